#pragma once

#include "lossless/errors.hpp"
#include "lossless/impulse_response.hpp"
#include "lossless/lti.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace lossless {

enum class PositiveRealStatus { positive_real, not_positive_real, inconclusive };

std::string to_string(PositiveRealStatus status);

struct PositiveRealOptions {
    /// Truncation point of the transform; 0 picks the smallest T with tail_mass(T) <= resolution.
    double t_max = 0.0;
    /// Largest acceptable tail bound. A larger tail makes the result inconclusive.
    double resolution = 1e-8;
};

/// Re g_hat(j w) = int_0^inf g(t) cos(w t) dt evaluated on a grid, with tail bound delta(T_max).
struct PositiveRealReport {
    PositiveRealStatus status = PositiveRealStatus::inconclusive;
    bool is_positive_real = false;
    double min_real_part = 0.0;
    double argmin_omega = 0.0;
    double tail_bound = 0.0;
    double quadrature_error = 0.0;
    double t_max = 0.0;
    std::vector<double> omegas;
    std::vector<double> real_parts;
};

PositiveRealReport check_positive_real(const ImpulseResponse& g, std::span<const double> omega_grid,
                                       const PositiveRealOptions& opts = {});

/// a_k = (2/tau) int_0^tau g(t) cos(k pi t / tau) dt for k = 0..N.
struct FourierCoefficients {
    double tau = 0.0;
    std::vector<double> a;
    std::vector<double> error;  ///< absolute quadrature error estimates

    double max_relative_error() const;
};

/// Throws InvalidArgument for tau <= 0 or a sampled record not covering [0, tau].
FourierCoefficients fourier_coeffs(const ImpulseResponse& g, double tau, std::size_t harmonics);

struct CertificateOptions {
    double requested_tau = 1.0;
    std::size_t max_harmonics = 1000000;
    double max_tau = 1e6;
};

struct ApproximationCertificate {
    double epsilon = 0.0;
    double requested_tau = 0.0;
    double tau = 0.0;
    std::size_t N = 0;
    std::vector<double> coeffs;              ///< a_0..a_N
    std::vector<std::size_t> negative_set;   ///< k with a_k < 0
    double C_value = 0.0;                    ///< (2/pi)(||g||_inf + ||g'||_L1)
    double sup_norm = 0.0;
    double derivative_l1 = 0.0;
    double delta_tau = 0.0;                  ///< tail_mass(tau)
    double g_l2_sq = 0.0;                    ///< ||g||^2 on [0, tau]
    double truncation_error = 0.0;           ///< ||g - g_N|| on [0, tau] via Parseval residual
    double negative_mass = 0.0;              ///< ||g_N^-||^2 = sum over negative_set, tau/2 weights
    std::size_t regime_cutoff = 0;           ///< floor(4 C^2 tau / eps^2)
    bool coefficient_bounds_hold = true;     ///< a_k >= max(-eps^2/(4 C tau), -C/k) over negative_set
    double achieved_error = 0.0;             ///< ||g - g_N^+|| on [0, tau] by quadrature
    std::vector<std::string> notes;

    /// a_k with the strictly negative ones set to zero.
    std::vector<double> positive_coeffs() const;
    /// Weight of a_k^2 in ||.||^2 on [0, tau]: tau/4 for k = 0, tau/2 otherwise.
    double weight(std::size_t k) const { return k == 0 ? 0.25 * tau : 0.5 * tau; }
};

/// Certificate plus a lossless realization of g_N^+ (cosine-series pattern with gains sqrt(a_k)).
struct CertifiedApproximation {
    ApproximationCertificate certificate;
    LosslessSystem system;
};

/// Raised when an inequality of the construction does not hold.
class CertificationFailed : public Error {
public:
    CertificationFailed(const std::string& what, std::string inequality, double lhs, double rhs,
                        ApproximationCertificate partial)
        : Error(what), inequality_(std::move(inequality)), lhs_(lhs), rhs_(rhs),
          partial_(std::move(partial)) {}

    const std::string& inequality() const noexcept { return inequality_; }
    double lhs() const noexcept { return lhs_; }
    double rhs() const noexcept { return rhs_; }
    const ApproximationCertificate& partial() const noexcept { return partial_; }

private:
    std::string inequality_;
    double lhs_;
    double rhs_;
    ApproximationCertificate partial_;
};

/// Chooses tau >= requested with delta(tau) <= eps^2/(8C), the smallest N with
/// ||g - g_N|| <= eps/2, drops strictly negative coefficients and realizes the rest.
/// Throws CertificationFailed, or ResourceExhausted when N would exceed the cap.
CertifiedApproximation build_certificate(const ImpulseResponse& g, double epsilon,
                                         const CertificateOptions& opts = {});

struct FalsifierOptions {
    /// Inputs are u(t) = sum_{m=1..modes} c_m (1 - cos(m pi t / T)), so u(0) = 0.
    std::size_t modes = 8;
    std::size_t random_inputs = 1000;
    std::uint64_t seed = 1;
    std::size_t grid_points = 2001;
    std::size_t max_verified = 32;
};

/// One input extracting energy from g: int_0^T y u dt = -K1 < 0.
struct EnergyWitness {
    std::vector<double> coeffs;
    double K1 = 0.0;
    double K2 = 0.0;  ///< ||u||_L1
    double K3 = 0.0;  ///< ||u||_L2
    double candidate_work = 0.0;          ///< int y_c u for the candidate from rest
    double candidate_final_energy = 0.0;  ///< 0.5 |x_c(T)|^2
    double energy_defect = 0.0;           ///< |work - final energy|
    double output_mismatch = 0.0;         ///< ||y_c - y||_L2
    double mismatch_lower_bound = 0.0;    ///< K1 / K3
    bool contradiction = false;           ///< candidate cannot reproduce the extraction
};

struct FalsificationReport {
    std::string input_family;
    double horizon = 0.0;
    std::size_t inputs_searched = 0;  ///< random draws plus the most negative direction
    std::size_t witnesses_found = 0;
    double min_eigenvalue = 0.0;  ///< of the supplied-energy quadratic form
    Eigen::MatrixXd supplied_energy_form;
    std::vector<EnergyWitness> verified;
    double min_candidate_work = 0.0;
    double max_energy_defect = 0.0;

    bool witness_found() const noexcept { return witnesses_found > 0; }
};

/// Searches for u with int_0^T (g * u) u dt < 0 and checks each witness against the candidate.
FalsificationReport falsify_if_direction(const ImpulseResponse& g, const LosslessSystem& candidate,
                                         double horizon, const FalsifierOptions& opts = {});

/// Supplied energy int_0^T (g * u) u dt for a single input, by quadrature.
double supplied_energy_under(const ImpulseResponse& g, const InputSignal& u, double horizon,
                             std::size_t grid_points = 2001);

} // namespace lossless
