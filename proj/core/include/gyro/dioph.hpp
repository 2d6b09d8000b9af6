#pragma once

// Truncated Diophantine conditions on (internal, normal) frequencies,
// the shrunken parameter domain, and grid scans of surviving parameters.

#include <Eigen/Core>
#include <functional>
#include <vector>

namespace gyro {

struct FrequencyData {
  Eigen::VectorXd omega;   // m internal frequencies
  Eigen::VectorXd omegaN;  // normal frequencies, ascending; empty for hyperbolic tori

  void validate() const;
};

struct DiophParams {
  double tau = 2.0;
  double gamma = 1e-3;
  int K = 100;  // bound on |k|_1

  void validate(int m) const;  // tau > m - 1, gamma > 0, K >= 1
};

struct DiophReport {
  bool pass = true;
  std::vector<int> worst_k;
  std::vector<int> worst_l;
  double worst_margin = 0.0;   // |<omega,k> + <omegaN,l>| - gamma |k|_1^-tau at worst pair
  double gamma_crit = 0.0;     // min over pairs of |<omega,k> + <omegaN,l>| |k|_1^tau
  int K = 0;
  long long pairs_checked = 0;
};

/// Checks every k != 0 with |k|_1 <= K against every l with |l|_1 <= 2 (l
/// ranges over the normal frequencies present; l = 0 only when there are
/// none). Passes iff all margins are >= 0.
DiophReport diophantine_check(const FrequencyData& f, const DiophParams& p);

using ParameterMap = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

struct ParameterBox {
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;

  void validate() const;
  bool contains(const Eigen::VectorXd& nu) const;     // closed box
  bool interior(const Eigen::VectorXd& nu) const;     // open box
};

/// Points of a regular grid with `per_axis` nodes per axis (endpoints
/// included), row-major with the last axis fastest.
std::vector<Eigen::VectorXd> box_grid(const ParameterBox& box, const std::vector<int>& per_axis);

/// nu -> [nu in the open box and dist(F(nu), F(boundary samples)) > gamma].
/// The image boundary is approximated by the images of the box-boundary
/// nodes of a grid with `boundary_grid` nodes per axis.
class ShrunkDomain {
 public:
  ShrunkDomain(ParameterMap F, ParameterBox box, double gamma, int boundary_grid);

  bool operator()(const Eigen::VectorXd& nu) const;
  double boundary_distance(const Eigen::VectorXd& nu) const;
  std::size_t boundary_samples() const { return images_.size(); }

 private:
  ParameterMap F_;
  ParameterBox box_;
  double gamma_;
  std::vector<Eigen::VectorXd> images_;
};

ShrunkDomain shrink_domain(ParameterMap F, const ParameterBox& box, double gamma,
                           int boundary_grid);

using FrequencyModel = std::function<FrequencyData(const Eigen::VectorXd&)>;

struct CantorScan {
  std::vector<Eigen::VectorXd> points;
  std::vector<DiophReport> reports;
  std::size_t survivors = 0;
  double fraction = 0.0;
};

CantorScan cantor_scan(const FrequencyModel& model, const ParameterBox& box,
                       const std::vector<int>& per_axis, const DiophParams& p,
                       unsigned workers = 1);

/// nu = (w, mu2): omega = (1, w); omegaN = (l0 - sqrt(mu2), l0 + sqrt(mu2))
/// for mu2 >= 0, none for mu2 < 0. l0 must not be rational, or 2 l0 is an
/// exact internal resonance for every elliptic point.
FrequencyData unfolding_frequency_model(const Eigen::VectorXd& nu,
                                        double lambda0 = 1.4142135623730951);

/// nu = (a): fixed internal omega; normal frequencies of the top's
/// linearization at P_a when it is elliptic, none otherwise.
FrequencyData top_frequency_model(const Eigen::VectorXd& nu, double c,
                                  const Eigen::VectorXd& omega);

}  // namespace gyro
