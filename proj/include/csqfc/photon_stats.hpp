#ifndef CSQFC_PHOTON_STATS_HPP
#define CSQFC_PHOTON_STATS_HPP

// Seeded Monte Carlo of a heralded photon passing through the converter and a
// DeMux, followed by time-tagged detection, coincidence histogramming and
// cross-correlation estimation.
//
// Timing model: photon pairs are generated in slots spaced by the slot period
// (1 / window_rate). Within a slot each pair is emitted at a uniform offset
// inside the herald coherence time, and both photons of a pair share it.
// Detector jitter is added afterwards. Choosing the slot period equal to the
// coincidence window makes mu the mean pair number per coincidence window, so
// a lossless, noiseless run gives g = 1 + 1/mu.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "csqfc/errors.hpp"
#include "csqfc/spectral.hpp"

namespace csqfc {

inline constexpr double kDefaultWindowPs = 476.0;
inline constexpr double kDefaultBinPs = 34.0;

struct SourceParams {
    double mean_pairs = 0.0581;  // mu, per slot
    double herald_efficiency = 1.0;
    double signal_path_efficiency = 1.0;
    double window_rate_hz = 1e12 / kDefaultWindowPs;
    double coherence_ps = 100.0;  // 10 GHz herald filter

    double slot_period_ps() const { return 1e12 / window_rate_hz; }
    void validate() const;
};

struct DetectorParams {
    double efficiency = 0.7;
    double dark_rate_hz = 100.0;
    double jitter_ps = 30.0;  // Gaussian sigma

    void validate() const;
};

// leak(j, k): probability that a photon in DeMux input channel k leaves from
// output j. Columns sum to at most one; the remainder is lost.
class CrosstalkMatrix {
public:
    explicit CrosstalkMatrix(int channels = 1);
    static CrosstalkMatrix identity(int channels);
    // Each channel keeps 1 - 2f (edge channels 1 - f) and leaks f into each neighbour.
    static CrosstalkMatrix nearest_neighbour(int channels, double fraction);

    int size() const { return n_; }
    double leak(int out_channel, int in_channel) const;
    void set_leak(int out_channel, int in_channel, double p);
    void validate() const;

private:
    std::size_t index(int out_channel, int in_channel) const;

    int n_;
    std::vector<double> leak_;
};

struct DetectionEvent {
    int detector = 0;  // 0 is the herald, j >= 1 is DeMux output channel j
    double time_ps = 0.0;

    friend bool operator==(const DetectionEvent&, const DetectionEvent&) = default;
};

// Everything needed to simulate the converter fed by a heralded source.
struct ConversionScenario {
    SourceParams source;
    DetectorParams herald_detector;
    DetectorParams channel_detector;
    ConversionDevice device;
    ChannelPlan pump_plan;
    ChannelPlan output_plan;
    Frequency signal;
    std::map<int, double> pump_power_mw;  // missing entries run at the optimal power
    CrosstalkMatrix crosstalk{1};
    double noise_rate_hz = 1000.0;  // Raman + residual background per output channel
    std::int64_t windows = 1'000'000;
    bool loss_before_conversion = true;
    int threads = 1;

    void validate() const;
    double pump_power(int pump_channel) const;
    double conversion_efficiency_of(int pump_channel) const;
    // DeMux channel that receives the converted photon, if it lands on the grid.
    std::optional<int> converted_channel(int pump_channel) const;
    double duration_s() const;
};

struct SimulationRun {
    int pump_channel = 0;
    std::vector<DetectionEvent> events;  // sorted by (time, detector)
    // Slots in which a herald click and a channel-j click came from the same pair.
    std::vector<std::int64_t> true_coincidences;  // index j - 1
    double duration_s = 0.0;
};

// Slots are processed in fixed-size blocks, each with its own generator seeded
// from (seed, block). Results therefore do not depend on scenario.threads.
SimulationRun simulate_run(const ConversionScenario& scenario, int pump_channel, std::uint64_t seed);

// Counter-based seed derivation.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t counter);

struct CoincidenceHistogram {
    double bin_width_ps = kDefaultBinPs;
    int half_bins = 0;                 // bins cover [-half_bins, half_bins) * bin_width
    std::vector<std::int64_t> counts;  // size 2 * half_bins
    double accumulation_s = 0.0;
    std::int64_t herald_singles = 0;
    std::int64_t channel_singles = 0;

    std::size_t bin_count() const { return counts.size(); }
    double bin_center_ps(std::size_t i) const;
    std::int64_t total() const;
};

// All-pairs start-stop histogram of (channel time - herald time) over
// [-span, span). Unsorted input is sorted first.
CoincidenceHistogram accumulate_histogram(std::span<const DetectionEvent> events, int herald_id, int channel_id,
                                          double bin_width_ps, double span_ps, double accumulation_s = 0.0);

struct CrossCorrelation {
    double g = 0.0;
    double std_err = 0.0;
    std::int64_t coincidences = 0;        // counts inside the window
    double accidentals_per_window = 0.0;  // plateau estimate scaled to the window
    std::int64_t plateau_counts = 0;
};

// Accidental level is zero, so g is undefined; `coincidences` still gives a
// lower bound on the excess.
class UndefinedCorrelation : public MeasurementError {
public:
    UndefinedCorrelation(const std::string& what, std::int64_t coincidences)
        : MeasurementError(what), coincidences_(coincidences) {}
    std::int64_t coincidences() const { return coincidences_; }

private:
    std::int64_t coincidences_;
};

// g = (counts within +-window/2) / (plateau level per bin * window bins).
// Plateau bins are those with |delay| > plateau_factor * window / 2; at least
// ten are required. std_err propagates Poisson errors of both counts.
CrossCorrelation estimate_cross_correlation(const CoincidenceHistogram& hist, double window_ps,
                                            double plateau_factor = 5.0);

struct CrossCorrEntry {
    bool defined = false;
    double g = 0.0;
    double std_err = 0.0;
    std::int64_t coincidences = 0;
    double accidentals = 0.0;  // expected accidental counts in the window
    std::int64_t plateau_counts = 0;
    std::int64_t true_coincidences = 0;
};

struct CrossCorrMatrix {
    std::vector<int> pump_channels;
    std::vector<int> output_channels;
    std::vector<std::vector<CrossCorrEntry>> entries;  // [pump][output]
};

struct MatrixOptions {
    double bin_width_ps = kDefaultBinPs;
    double span_ps = 5000.0;
    double window_ps = kDefaultWindowPs;
    double plateau_factor = 5.0;
};

// One simulate_run per pump channel of the scenario's pump plan; the run for
// pump i is seeded from (seed, i).
CrossCorrMatrix cross_corr_matrix(const ConversionScenario& scenario, std::uint64_t seed,
                                  const MatrixOptions& options = {});

// Inputs to the closed-form heralded cross-correlation.
struct AnalyticInputs {
    double mean_pairs = 0.0581;
    double herald_detection = 1.0;  // per-photon probability, herald arm
    double signal_detection = 1.0;  // per-photon probability, signal arm into this channel
    double herald_noise_hz = 0.0;
    double signal_noise_hz = 0.0;
    double slot_period_ps = kDefaultWindowPs;
    double window_ps = kDefaultWindowPs;
};

// Click probabilities per slot for a single-mode thermal pair source.
struct ClickProbabilities {
    double herald = 0.0;
    double signal = 0.0;
    double joint = 0.0;
};
ClickProbabilities thermal_click_probabilities(double mean_pairs, double herald_detection, double signal_detection);

double analytic_g(const AnalyticInputs& in);

// AnalyticInputs for output `out_channel` of `scenario` with pump `pump_channel`.
AnalyticInputs analytic_inputs(const ConversionScenario& scenario, int pump_channel, int out_channel,
                               double window_ps = kDefaultWindowPs);

std::string events_csv(std::span<const DetectionEvent> events);
std::string histogram_csv(const CoincidenceHistogram& hist, double window_ps, double plateau_factor = 5.0);
std::string matrix_csv(const CrossCorrMatrix& m);

}  // namespace csqfc

#endif
