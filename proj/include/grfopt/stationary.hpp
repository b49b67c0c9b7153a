#pragma once

// Direct stationary-isotropic covariance route. Works with the increment
// Delta = x - y instead of the lifted three-argument kernel, so it serves as
// an independent cross-check of `lift_stationary`.

#include "grfopt/kernel.hpp"

namespace grfopt {

struct StationaryPair {
  double c = 0.0;   // C(|Delta|^2 / 2)
  double c1 = 0.0;  // C'
  double c2 = 0.0;  // C''

  double f_f() const { return c; }
  /// N Cov(D_v f(x), f(y)) = C' <Delta, v>
  double df_f(double ip_xv, double ip_yv) const { return c1 * (ip_xv - ip_yv); }
  /// N Cov(f(x), D_w f(y)) = -C' <Delta, w>
  double f_df(double ip_yw, double ip_xw) const { return c1 * (ip_yw - ip_xw); }
  /// N Cov(D_v f(x), D_w f(y)) = -(C'' <Delta, v><Delta, w> + C' <v, w>)
  double df_df(double ip_xv, double ip_yv, double ip_xw, double ip_yw, double ip_vw) const {
    return -(c2 * (ip_xv - ip_yv) * (ip_xw - ip_yw) + c1 * ip_vw);
  }
  double orthogonal() const { return -c1; }
};

class StationaryModel {
 public:
  StationaryModel(SchoenbergMixture mixture, double mean_level)
      : mixture_(std::move(mixture)), mean_level_(mean_level) {}

  const SchoenbergMixture& mixture() const { return mixture_; }
  double mean(double) const { return mean_level_; }
  double mean_slope(double) const { return 0.0; }

  StationaryPair at(double s_x, double s_y, double ip_xy) const {
    check_domain(s_x, s_y, ip_xy);
    const auto v = mixture_.evaluate(s_x + s_y - ip_xy);
    return {v.c, v.c1, v.c2};
  }

 private:
  SchoenbergMixture mixture_;
  double mean_level_;
};

}  // namespace grfopt
