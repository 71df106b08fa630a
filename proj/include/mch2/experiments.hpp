#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mch2/dynamics.hpp"
#include "mch2/operators.hpp"
#include "mch2/spectral.hpp"

namespace mch2 {

// Oscillating family on T^2: u_i = kappa/n + n^{-s} cos eta_i with eta_1 = n x_2 - kappa t,
// eta_2 = n x_1 - kappa t, and gamma = n^{-s} (cos eta_1 + cos eta_2).
struct ApproxFamilyParams {
    int kappa = 1;
    int n = 8;
    double s = 2.5;
    double sigma = 1.2;
    int d = 2;
    double T = 1.0;

    void validate() const;
};

// smallest power of two >= requested whose cutoff resolves the family's quadratic terms (K >= 2n)
int family_grid_size(int n, int requested);

State approx_solution(const ApproxFamilyParams& p, double t, const Grid& g);
// d/dt y in closed form
Tendency approx_time_derivative(const ApproxFamilyParams& p, double t, const Grid& g);
// r = d/dt y - drift(y), evaluated spectrally
Tendency family_residual(const ApproxFamilyParams& p, double t, const Grid& g);

struct ResidualSeries {
    std::vector<double> t, norm;  // ||E(t)||_{H^sigma}
    int grid_n = 0;
};

// E(t) = int_0^t r by composite Simpson with `panels` panels per t_grid interval.
// t_grid must start at 0 and increase.
ResidualSeries residual_error(const ApproxFamilyParams& p, const std::vector<double>& t_grid, int requested_n = 512,
                              int panels = 8);

struct DecayFit {
    double theta = 0.0;      // minus the slope of log error against log n
    double intercept = 0.0;
    double residual = 0.0;   // rms of the log residuals
};

// ns must be a geometric sequence of at least four values
DecayFit decay_fit(const std::vector<double>& ns, const std::vector<double>& errors);
// 2s - sigma - 1 up to s = 3, s - sigma + 2 beyond
double expected_decay(double s, double sigma, int d);

struct DecayStudy {
    std::vector<int> ns, grid_ns;
    std::vector<double> errors;  // ||E(T)||_{H^sigma}
    DecayFit fit;
    double expected = 0.0;
};
DecayStudy decay_study(double s, double sigma, int d, const std::vector<int>& ns, double T = 1.0, int requested_n = 512);

// Term-by-term comparison of the spectral operators on the family with their closed forms.
// gamma is read as the d-vector u (each nonlocal gamma term applied per component and summed).
struct DisplayCheck {
    std::string name;
    double mismatch = 0.0;  // max coefficient difference
    double scale = 0.0;     // max coefficient of the closed form
};
struct ClosedFormCheck {
    std::vector<DisplayCheck> displays;
    double literal_assembly = 0.0;  // u residual against the S_i with coefficients 3, -3, -3
};
ClosedFormCheck closed_form_check(int n, double s, int kappa, double t, int grid_n);

struct FamilyGap {
    double initial = 0.0;
    double sup = 0.0;
    double t_sup = 0.0;
};
// sup over t in [0, T] of ||y^{1,n}(t) - y^{-1,n}(t)||_{H^s}, sampled on `samples` + 1 points plus min(T, pi/2)
FamilyGap family_gap(int n, double s, int d, double T, int samples = 64);

struct GapRun {
    int grid_n = 512;
    double dt = 0.025;
    double c = 0.0;  // linear noise strength, 0 for the deterministic run
};
struct SimulatedGap {
    double initial = 0.0;
    double sup = 0.0;
    double family_sup = 0.0;
    Status status_plus = Status::survived, status_minus = Status::survived;
    std::vector<double> t, gap;
};
SimulatedGap simulated_gap(int n, double s, int d, double T, std::uint64_t seed, const GapRun& run = {});

// 1-D data with u0' = -A (periodic Gaussian of width w centred at pi, minus its mean)
// and gamma0 = gamma_amplitude cos x
struct SteepData {
    double amplitude = 4.0;
    double width = 0.12;
    double gamma_amplitude = 0.1;
};
State steep_slope_data(const Grid& g, const SteepData& p);

std::uint64_t member_seed(std::uint64_t base, std::uint64_t index);
// members run on `jobs` threads; results are in member order and independent of jobs
std::vector<Trajectory> run_members(const SimConfig& cfg, const State& y0, int members, std::uint64_t base_seed,
                                    int jobs);

struct LognormEnvelope {
    std::vector<double> t, envelope;  // max over members of the running max of l(t) - l(0)
    double slope = 0.0, intercept = 0.0;
    double residual = 0.0;  // rms misfit of the affine fit
    double offset = 0.0;    // shift making intercept + offset + slope t dominate the envelope
};
LognormEnvelope lognorm_envelope(const std::vector<Trajectory>& runs, double t_end, int nodes = 50);

struct EnsembleReport {
    int members = 0, survived = 0, broke = 0, underflow = 0;
    std::optional<double> survival_fraction;  // empty for zero members
    std::vector<std::uint64_t> seeds;
    std::vector<Status> status;
    std::vector<double> stop_times;
    std::vector<double> breaking_times;  // stop times of the broken members, in member order
    LognormEnvelope lognorm;
    // breaking ensembles only
    std::optional<double> riccati_window;
    std::vector<long> clock_gaps;  // record gap between the two clock crossings, -1 if one is missing
    bool slope_ordering = true;    // min slope below -sqrt(E0) no later than the first crossing
};

EnsembleReport summarize(const std::vector<Trajectory>& runs, double t_end);

// 1..4 for the polynomial noise cases with global solutions, 0 otherwise
int global_regime(const NoiseModel& noise);
EnsembleReport global_ensemble(const SimConfig& cfg, const State& y0, int members, std::uint64_t base_seed, int jobs = 1);

// Same member seeds at every scale; clock thresholds scale with the data through the factors.
struct ScaleSweep {
    std::vector<double> scales;
    std::vector<EnsembleReport> reports;
};
ScaleSweep scale_sweep(const SimConfig& cfg, const State& y0, const std::vector<double>& scales, double winf_factor,
                       double hs_factor, int members, std::uint64_t base_seed, int jobs = 1);

// H^s level reached by the zero-noise run at its W^{1,inf} crossing, used as the H^s threshold
std::optional<double> calibrate_hs_threshold(const SimConfig& cfg, const State& y0);

EnsembleReport breaking_ensemble(const SimConfig& cfg, const State& y0, double lambda, int members,
                                 std::uint64_t base_seed, int jobs = 1);

}  // namespace mch2
