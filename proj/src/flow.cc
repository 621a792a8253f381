// Copyright 2026 The geoctl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "geoctl/flow.h"

#include <algorithm>
#include <cmath>

namespace geoctl {
namespace {

// Dormand-Prince 5(4) tableau.
constexpr double kA21 = 1.0 / 5;
constexpr double kA31 = 3.0 / 40, kA32 = 9.0 / 40;
constexpr double kA41 = 44.0 / 45, kA42 = -56.0 / 15, kA43 = 32.0 / 9;
constexpr double kA51 = 19372.0 / 6561, kA52 = -25360.0 / 2187,
                 kA53 = 64448.0 / 6561, kA54 = -212.0 / 729;
constexpr double kA61 = 9017.0 / 3168, kA62 = -355.0 / 33,
                 kA63 = 46732.0 / 5247, kA64 = 49.0 / 176,
                 kA65 = -5103.0 / 18656;
constexpr double kA71 = 35.0 / 384, kA73 = 500.0 / 1113, kA74 = 125.0 / 192,
                 kA75 = -2187.0 / 6784, kA76 = 11.0 / 84;
constexpr double kE1 = 71.0 / 57600, kE3 = -71.0 / 16695, kE4 = 71.0 / 1920,
                 kE5 = -17253.0 / 339200, kE6 = 22.0 / 525, kE7 = -1.0 / 40;

class Stepper {
 public:
  Stepper(const Field& field, const IntegratorConfig& cfg, FlowStats* stats)
      : field_(field), cfg_(cfg), stats_(stats), d_(field.dim()),
        k1_(d_), k2_(d_), k3_(d_), k4_(d_), k5_(d_), k6_(d_), k7_(d_),
        tmp_(d_), y_new_(d_), err_(d_), half_(d_) {}

  // Advances y from 0 to `span` (signed).
  void Advance(Vec& y, double span) {
    if (span == 0.0) return;
    const double dir = span > 0.0 ? 1.0 : -1.0;
    const double total = std::abs(span);
    double done = 0.0;
    if (!have_k1_) {
      F(y, k1_);
      have_k1_ = true;
      CheckRadius(y);
      if (!field_.smooth()) {
        kinks_.clear();
        field_.KinkArguments(y, &kinks_);
      }
    }
    if (h_ <= 0.0) h_ = InitialStep(y, dir);
    const double h_min = 1e-14 * std::max(1.0, total);
    while (done < total) {
      double h = std::min({h_, cfg_.max_step, total - done});
      const bool last = h >= total - done;
      if (h < h_min && !last) {
        throw IntegrationError(IntegrationError::Kind::kStepUnderflow,
                               "integrator step size underflow");
      }
      if (steps_++ > cfg_.max_steps) {
        throw IntegrationError(IntegrationError::Kind::kTooManySteps,
                               "integrator exceeded max_steps");
      }
      const double err = Step(y, dir * h, y_new_);
      bool accept = err <= 1.0;
      if (!field_.smooth() && CrossesKink(y_new_)) {
        if (h > cfg_.kink_max_step) {
          h_ = cfg_.kink_max_step;
          continue;
        }
        // Step doubling across the kink.
        Step(y, 0.5 * dir * h, half_);
        k1_.swap(k7_);
        Step(half_, 0.5 * dir * h, y_new_);
        accept = true;
      }
      if (!accept) {
        if (stats_) ++stats_->rejected;
        h_ = h * std::max(0.2, 0.9 * std::pow(err, -0.2));
        continue;
      }
      y.swap(y_new_);
      k1_.swap(k7_);
      CheckRadius(y);
      if (!field_.smooth()) {
        kinks_.clear();
        field_.KinkArguments(y, &kinks_);
      }
      if (stats_) ++stats_->accepted;
      done = last ? total : done + h;
      const double grow =
          err == 0.0 ? 5.0 : std::min(5.0, std::max(0.2, 0.9 * std::pow(err, -0.2)));
      h_ = last ? std::max(h_, h * grow) : h * grow;
    }
  }

 private:
  void F(const Vec& x, Vec& out) {
    field_.Eval({x.data(), static_cast<std::size_t>(d_)},
                {out.data(), static_cast<std::size_t>(d_)});
    if (stats_) ++stats_->evaluations;
  }

  void CheckRadius(const Vec& y) {
    const double r = y.norm();
    if (stats_) stats_->max_radius = std::max(stats_->max_radius, r);
    if (cfg_.safety && r > cfg_.safety->safety_radius) {
      throw IntegrationError(IntegrationError::Kind::kSafetyRadius,
                             "trajectory left the safety radius " +
                                 std::to_string(cfg_.safety->safety_radius));
    }
  }

  double Norm(const Vec& v, const Vec& y, const Vec& y2) const {
    double sum = 0.0;
    for (int i = 0; i < d_; ++i) {
      const double sc =
          cfg_.abs_tol + cfg_.rel_tol * std::max(std::abs(y[i]), std::abs(y2[i]));
      const double r = v[i] / sc;
      sum += r * r;
    }
    return std::sqrt(sum / d_);
  }

  double InitialStep(const Vec& y, double dir) {
    const double d0 = Norm(y, y, y);
    const double d1 = Norm(k1_, y, y);
    const double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    tmp_ = y + dir * h0 * k1_;
    F(tmp_, k2_);
    const double d2 = Norm(k2_ - k1_, y, y) / h0;
    const double dm = std::max(d1, d2);
    const double h1 = dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 0.2);
    return std::min(100.0 * h0, h1);
  }

  // One DP step of signed size h from y (k1_ holds f(y)). Writes the 5th
  // order solution to out, fills k7_ = f(out) and returns the error norm.
  double Step(const Vec& y, double h, Vec& out) {
    tmp_ = y + h * kA21 * k1_;
    F(tmp_, k2_);
    tmp_ = y + h * (kA31 * k1_ + kA32 * k2_);
    F(tmp_, k3_);
    tmp_ = y + h * (kA41 * k1_ + kA42 * k2_ + kA43 * k3_);
    F(tmp_, k4_);
    tmp_ = y + h * (kA51 * k1_ + kA52 * k2_ + kA53 * k3_ + kA54 * k4_);
    F(tmp_, k5_);
    tmp_ = y + h * (kA61 * k1_ + kA62 * k2_ + kA63 * k3_ + kA64 * k4_ +
                    kA65 * k5_);
    F(tmp_, k6_);
    out = y + h * (kA71 * k1_ + kA73 * k3_ + kA74 * k4_ + kA75 * k5_ +
                   kA76 * k6_);
    F(out, k7_);
    err_ = h * (kE1 * k1_ + kE3 * k3_ + kE4 * k4_ + kE5 * k5_ + kE6 * k6_ +
                kE7 * k7_);
    const double e = Norm(err_, y, out);
    return std::isfinite(e) ? e : std::numeric_limits<double>::infinity();
  }

  bool CrossesKink(const Vec& y_new) {
    new_kinks_.clear();
    field_.KinkArguments(y_new, &new_kinks_);
    if (new_kinks_.size() != kinks_.size()) return true;
    for (std::size_t i = 0; i < kinks_.size(); ++i) {
      if ((kinks_[i] > 0.0) != (new_kinks_[i] > 0.0) ||
          (kinks_[i] < 0.0) != (new_kinks_[i] < 0.0)) {
        return true;
      }
    }
    return false;
  }

  const Field& field_;
  const IntegratorConfig& cfg_;
  FlowStats* stats_;
  int d_;
  Vec k1_, k2_, k3_, k4_, k5_, k6_, k7_, tmp_, y_new_, err_, half_;
  std::vector<double> kinks_, new_kinks_;
  bool have_k1_ = false;
  double h_ = 0.0;
  std::int64_t steps_ = 0;
};

}  // namespace

void IntegratorConfig::Validate() const {
  if (!(rel_tol > 0.0 && rel_tol <= 1e-2) || !(abs_tol > 0.0 && abs_tol <= 1e-2)) {
    throw InvalidArgument("integrator tolerances must lie in (0, 1e-2]");
  }
  if (!(max_step > 0.0) || !(kink_max_step > 0.0) || max_steps < 1) {
    throw InvalidArgument("integrator step limits must be positive");
  }
}

Vec IntegrateFlow(const Field& field, const Vec& y0, double t,
                  const IntegratorConfig& cfg, FlowStats* stats) {
  if (y0.size() != field.dim()) throw DimensionError("point dimension mismatch");
  if (!std::isfinite(t)) throw InvalidArgument("flow time must be finite");
  Vec y = y0;
  if (t == 0.0) return y;
  cfg.Validate();
  Stepper stepper(field, cfg, stats);
  stepper.Advance(y, t);
  return y;
}

std::vector<Vec> IntegrateFlowAt(const Field& field, const Vec& y0,
                                 std::span<const double> times,
                                 const IntegratorConfig& cfg,
                                 FlowStats* stats) {
  if (y0.size() != field.dim()) throw DimensionError("point dimension mismatch");
  cfg.Validate();
  std::vector<Vec> out;
  out.reserve(times.size());
  Stepper stepper(field, cfg, stats);
  Vec y = y0;
  double at = 0.0;
  for (double t : times) {
    if (!std::isfinite(t) || t * at < 0.0 || std::abs(t) < std::abs(at)) {
      throw InvalidArgument("output times must share a sign and grow in magnitude");
    }
    stepper.Advance(y, t - at);
    at = t;
    out.push_back(y);
  }
  return out;
}

FlowWord FlowWord::FromComposition(std::vector<Leg> composition) {
  std::reverse(composition.begin(), composition.end());
  return FlowWord{std::move(composition)};
}

FlowWord FlowWord::Inverse() const {
  FlowWord inv;
  inv.legs.assign(legs.rbegin(), legs.rend());
  for (Leg& leg : inv.legs) {
    leg.time = -leg.time;
    leg.coefficient = -leg.coefficient;
  }
  return inv;
}

nlohmann::json FlowWord::ToJson() const {
  nlohmann::json out = nlohmann::json::array();
  for (const Leg& leg : legs) {
    nlohmann::json rec = {{"j", leg.field + 1}, {"t", leg.time}};
    if (leg.group >= 0) {
      rec["g"] = leg.group;
      rec["c"] = leg.coefficient;
    }
    out.push_back(std::move(rec));
  }
  return out;
}

FlowWord FlowWord::FromJson(const nlohmann::json& j) {
  if (!j.is_array()) throw InvalidArgument("flow word must be a JSON array");
  FlowWord word;
  for (const auto& rec : j) {
    Leg leg;
    leg.field = rec.at("j").get<int>() - 1;
    leg.time = rec.at("t").get<double>();
    if (leg.field < 0) throw InvalidArgument("flow word indices are 1-based");
    if (!std::isfinite(leg.time)) throw InvalidArgument("leg time must be finite");
    if (rec.contains("g")) {
      leg.group = rec.at("g").get<int>();
      leg.coefficient = rec.value("c", 1.0);
    }
    word.legs.push_back(leg);
  }
  return word;
}

Vec ApplyWord(const FieldSet& fields, const FlowWord& word, const Vec& y0,
              const IntegratorConfig& cfg, std::vector<Vec>* leg_endpoints,
              FlowStats* stats) {
  Vec y = y0;
  for (std::size_t k = 0; k < word.legs.size(); ++k) {
    const Leg& leg = word.legs[k];
    if (leg.field < 0 || leg.field >= static_cast<int>(fields.size())) {
      throw InvalidArgument("flow word leg " + std::to_string(k) +
                            " references a missing field");
    }
    try {
      y = IntegrateFlow(*fields[leg.field], y, leg.time, cfg, stats);
    } catch (const IntegrationError& e) {
      throw IntegrationError(e.kind(),
                             "leg " + std::to_string(k) + ": " + e.what(),
                             static_cast<int>(k));
    }
    if (leg_endpoints) leg_endpoints->push_back(y);
  }
  return y;
}

FlowWord CommutatorPrimitive(int i, int j, double s, int group) {
  if (i == j) throw InvalidArgument("commutator needs two distinct fields");
  FlowWord w;
  w.legs = {{i, s, group, 1.0}, {j, s, group, 1.0},
            {i, -s, group, -1.0}, {j, -s, group, -1.0}};
  return w;
}

double GroupLawResidual(const Field& field, const Vec& y0, double s, double t,
                        const IntegratorConfig& cfg) {
  const Vec two_legs = IntegrateFlow(field, IntegrateFlow(field, y0, s, cfg), t, cfg);
  const Vec one_leg = IntegrateFlow(field, y0, t + s, cfg);
  return (two_legs - one_leg).norm();
}

}  // namespace geoctl
