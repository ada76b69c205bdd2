#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spikecls/intensity.hpp"

namespace spikecls {

enum class ClassLabel : int { omega1 = 1, omega2 = 2 };

inline ClassLabel other_class(ClassLabel c) {
  return c == ClassLabel::omega1 ? ClassLabel::omega2 : ClassLabel::omega1;
}

// One realization X = [t_1, ..., t_N; N] on the window [0, T].
struct SpikeTrain {
  std::vector<double> times;  // strictly increasing, in (0, T]
  double window_T = 0.0;

  int count() const { return static_cast<int>(times.size()); }
};

struct LabeledSample {
  SpikeTrain train;
  ClassLabel label = ClassLabel::omega1;
};

struct TrainingSet {
  std::vector<LabeledSample> samples;
  double window_T = 0.0;
  double pi1 = 0.5;
  double pi2 = 0.5;
  std::uint64_t seed = 0;

  int size() const { return static_cast<int>(samples.size()); }
  int count_class(ClassLabel label) const;
};

// Lewis-Shedler thinning against a homogeneous dominating process. The
// dominating rate is the exact envelope bound times a 1.001 safety factor,
// so the rejection loop draws exactly from the target law.
class PoissonSampler {
 public:
  PoissonSampler(const IntensityModel& model, double T);

  SpikeTrain draw(std::uint64_t seed) const;
  double dominating_rate() const { return dominating_rate_; }

 private:
  IntensityModel model_;
  double window_T_;
  double dominating_rate_;
};

SpikeTrain sample_poisson(const IntensityModel& model, double T,
                          std::uint64_t seed);

// Repairs FP-resolution ties by nudging one ulp up; events pushed past T are
// dropped. Input must be sorted.
void enforce_strictly_increasing(std::vector<double>& times, double T);

// Labels ~ iid(priors), trains from the labeled class. Sample i depends only
// on (seed, i), so the result is identical for any worker count and is a
// prefix of any larger set with the same seed.
TrainingSet generate_training_set(const IntensityModel& lambda1,
                                  const IntensityModel& lambda2, double pi1,
                                  double pi2, int L, double T,
                                  std::uint64_t seed, int threads = 1);

// Events file: header sample_id,label,event_time; one row per event.
// Manifest file: header T,L,seed + one value row, then sample_id,label,n_events
// rows (empty trains appear here with n_events = 0).
void write_dataset_csv(const TrainingSet& data, const std::string& events_path,
                       const std::string& manifest_path);
TrainingSet read_dataset_csv(const std::string& events_path,
                             const std::string& manifest_path);

}  // namespace spikecls
