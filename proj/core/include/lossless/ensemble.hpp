#pragma once

#include "lossless/harmonic.hpp"
#include "lossless/input_signal.hpp"
#include "lossless/lti.hpp"
#include "lossless/numerics.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace lossless {

/// Gaussian law of the initial state. Trial j draws from seed base_seed + j, so serial and
/// parallel runs produce the same samples.
struct EnsembleSpec {
    Eigen::VectorXd mean0;
    Eigen::MatrixXd X;  ///< covariance of x(0), symmetric PSD
    std::size_t trials = 2;
    std::uint64_t base_seed = 0;
};

/// X = T I with zero mean.
EnsembleSpec thermal_ensemble(Eigen::Index n, double temperature, std::size_t trials,
                              std::uint64_t base_seed);

/// Throws InvalidArgument on dimension mismatch, asymmetric or indefinite X (1e-10), or
/// fewer than two trials.
void validate(const EnsembleSpec& spec, Eigen::Index n);

/// Output covariance B^T e^{Jt} X e^{-Js} B of the homogeneous response. For a K_N
/// realization B already carries the sqrt(2), which yields the factor 2 of the closed form.
double covariance_exact(const LosslessSystem& sys, const Eigen::MatrixXd& X, double s, double t);
double covariance_exact(const HarmonicRealization& real, const Eigen::MatrixXd& X, double s,
                        double t);

/// Empirical statistics of y over the ensemble, on `grid`.
struct CovarianceEstimate {
    std::vector<double> grid;
    Eigen::VectorXd mean;
    Eigen::VectorXd mean_stderr;
    Eigen::MatrixXd R_hat;   ///< unbiased (trials - 1) covariance, symmetric by construction
    Eigen::MatrixXd stderr;  ///< standard error of each R_hat entry
    std::size_t trials = 0;
};

/// Deterministic part of the response: output of simulate(sys, u, mean0, grid).
std::vector<double> deterministic_response(const LosslessSystem& sys,
                                           const Eigen::VectorXd& mean0, const InputSignal& u,
                                           std::span<const double> grid);

/// Monte Carlo over initial states. The forced response is computed once on `grid` and
/// added to every trial's homogeneous response.
CovarianceEstimate ensemble_simulate(const LosslessSystem& sys, const EnsembleSpec& spec,
                                     const InputSignal& u, std::span<const double> grid,
                                     const ExecutionOptions& exec = {});
CovarianceEstimate ensemble_simulate(const HarmonicRealization& real, const EnsembleSpec& spec,
                                     const InputSignal& u, std::span<const double> grid,
                                     const ExecutionOptions& exec = {});

struct TemperatureOptions {
    std::vector<double> times;  ///< (s, t) grid; default 0..10 in 11 points
    double tolerance = 1e-8;    ///< sup defect accepted for a thermal law
    double commute_tolerance = 1e-10;
};

struct TemperatureCheck {
    bool is_thermal = false;
    std::optional<double> temperature;
    double fitted_temperature = 0.0;  ///< least-squares fit, reported even when not thermal
    double max_defect = 0.0;          ///< sup |R(s,t) - T B^T e^{J(t-s)} B|
    bool commutes = false;            ///< ||XJ - JX||_max within tolerance
    bool b_eigenvector = false;       ///< X B = mu B within tolerance
    double commutator_norm = 0.0;
    double b_eigenvalue = 0.0;        ///< mu = B^T X B / B^T B
    bool sufficient_condition() const { return commutes && b_eigenvector; }
};

/// Output-level test for a temperature plus the commuting/eigenvector sufficient condition.
TemperatureCheck check_temperature(const LosslessSystem& sys, const Eigen::MatrixXd& X,
                                   const TemperatureOptions& opts = {});

struct EquipartitionState {
    Eigen::MatrixXd X;
    double temperature = 0.0;
};

/// X = (2E/n) I and T = 2E/n: the maximum-entropy law with mean energy E and zero mean.
/// n need not be odd. Throws InvalidArgument for E < 0 or n < 1.
EquipartitionState maxent_covariance(double energy, Eigen::Index n);

/// X = (2i/h) int_{-h}^0 e^{-J s} B_N B_N^T e^{J s} ds, from exact antiderivatives.
/// Equals (i k / tau) I when h = 2 tau. Throws InvalidArgument unless h > 0.
Eigen::MatrixXd whitenoise_covariance(const HarmonicRealization& real, double intensity,
                                      double h);

/// 0.5 log det(2 pi e X) for positive definite X.
double gaussian_entropy(const Eigen::MatrixXd& X);

struct FluctuationDissipationReport {
    bool checked = false;  ///< false when X is not thermal
    std::optional<double> temperature;
    std::vector<double> lags;
    std::vector<double> covariance;        ///< R(s0, s0 + lag)
    std::vector<double> impulse_response;  ///< simulated B^T e^{J lag} B
    double max_defect = 0.0;  ///< sup |R/T - h| (or sup |R| when T = 0)
    std::string note;
};

/// Compares the thermal output covariance against the simulated impulse response on
/// non-negative, increasing `lags`, using covariance base times 0 and `base_time`.
FluctuationDissipationReport fluctuation_dissipation_check(const LosslessSystem& sys,
                                                           const Eigen::MatrixXd& X,
                                                           std::span<const double> lags,
                                                           double base_time = 0.0,
                                                           const TemperatureOptions& opts = {});

struct BandOptions {
    double window = 0.0;      ///< observation window; 0 selects 2 tau (one recurrence period)
    std::size_t samples = 0;  ///< samples per path; 0 selects a power of two above 4N + 4
    ExecutionOptions exec;
};

/// Power of the output through an ideal brick-wall low-pass of half-width `bandwidth`
/// (rad/s), estimated from per-trial periodograms of the homogeneous output.
///
/// spectral_integral is int_{-B}^{B} S(w) dw, where S is the two-sided density with
/// R(lag) = (1/2pi) int S(w) e^{i w lag} dw; white noise of intensity 2Tk integrates to
/// 4TkB. filtered_variance is the mean square of the filtered path, spectral_integral/2pi.
/// Periodogram bins count as piecewise-constant density over their width, so bins
/// straddling the band edge contribute in proportion to their overlap.
struct BandLimitedVariance {
    double bandwidth = 0.0;
    double spectral_integral = 0.0;
    double spectral_integral_stderr = 0.0;
    double filtered_variance = 0.0;
    double window = 0.0;
    std::size_t samples = 0;
    std::size_t trials = 0;
};

BandLimitedVariance band_limited_variance(const HarmonicRealization& real,
                                          const EnsembleSpec& spec, double bandwidth,
                                          const BandOptions& opts = {});

} // namespace lossless
