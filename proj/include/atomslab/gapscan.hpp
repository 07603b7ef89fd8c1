#pragma once

#include "atomslab/model_zoo.hpp"
#include "atomslab/panel.hpp"

#include <cstddef>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

namespace atomslab {

// Per-period squared-error differences of two fixed models on the validation
// data of periods 1..t-1:
//   u_{j,i} = (f1(x_{j,i}) - y_{j,i})^2 - (f2(x_{j,i}) - y_{j,i})^2.
// per_period[0] holds period 1; the newest period is last.
struct LossDifferenceStream {
  std::vector<std::vector<double>> per_period;

  std::size_t periods() const { return per_period.size(); }
};

// Diagnostics for one look-back window ell:
//   n         pooled validation count over the last ell periods
//   delta_hat pooled mean of u (rolling estimate of the performance gap)
//   v_hat     pooled sample standard deviation of u (empty when n = 1)
//   psi_hat   stochastic-error proxy (empirical Bernstein)
//   phi_hat   drift-bias proxy (worst pairwise window disagreement)
//   score     phi_hat + psi_hat, the quantity minimized over ell
struct GapScanRow {
  std::size_t window = 0;
  std::size_t n = 0;
  double delta_hat = 0.0;
  std::optional<double> v_hat;
  double psi_hat = 0.0;
  double phi_hat = 0.0;
  double score = 0.0;
};

struct ComparisonConfig {
  double delta_prime = 0.1;  // confidence parameter in (0, 1)
  double m_squared = 5e-4;   // boundedness scale M^2
  double v_floor = 1e-8;     // second-moment floor v (R^2 variant only)
  std::optional<std::size_t> max_lookback; // cap L on the scanned windows
};

// Flags raised by gap_scan_r2 when a supplied second moment had to be
// clamped up to v_floor.
struct R2ScanDiagnostics {
  std::vector<int> clamped_periods; // 1-based period ordinals
};

// Evaluates both models on the validation observations of periods 1..t-1.
// Requires t >= 2 and matching covariate dimensions.
LossDifferenceStream loss_difference_stream(const FittedModel& f1, const FittedModel& f2,
                                            const SplitPanel& validation, int t);

// The full window scan for ell = 1..min(t-1, max_lookback):
//   delta_hat(ell) = (1/n) sum of u over the last ell periods
//   v_hat(ell)^2   = (1/(n-1)) sum (u - delta_hat)^2
//   psi_hat(ell)   = 8 M^2                                      if n = 1
//                    v_hat sqrt(2 log(2/d')/n)
//                      + 64 M^2 log(2/d') / (3 (n-1))           if n >= 2
//   phi_hat(ell)   = max_{i <= ell} (|delta_hat(ell) - delta_hat(i)|
//                                    - [psi_hat(ell) + psi_hat(i)])_+
// Sums are accumulated once (prefix sums over periods, newest first).
std::vector<GapScanRow> gap_scan(const LossDifferenceStream& stream,
                                 const ComparisonConfig& config);

// R^2-metric variant. second_moments[j-1] holds V_j for period j; values
// below v_floor are clamped (non-positive ones additionally reported through
// diagnostics). With V(ell) = (1/n) sum n_j V_j over the window:
//   delta_hat_R = delta_hat / V(ell),  v_hat_R = v_hat / V(ell),
//   psi_hat_R   = 8 M^2 / v                                     if n = 1
//                 v_hat_R sqrt(2 log(2/d')/n)
//                   + 64 (M^2/v) log(2/d') / (3 (n-1))          if n >= 2
// and phi_hat_R is formed from the R-scaled quantities.
std::vector<GapScanRow> gap_scan_r2(const LossDifferenceStream& stream,
                                    std::span<const double> second_moments,
                                    const ComparisonConfig& config,
                                    R2ScanDiagnostics* diagnostics = nullptr);

// Empirical second moments (1/n_j) sum y^2 of the validation data of periods
// 1..t-1, the plug-in V_j for the R^2 variant.
std::vector<double> validation_second_moments(const SplitPanel& validation, int t);

// Diagnostic table: header "ell,n,delta_hat,v_hat,psi_hat,phi_hat,score";
// an undefined v_hat is written as "nan".
void write_scan_csv(std::ostream& out, std::span<const GapScanRow> rows);

} // namespace atomslab
