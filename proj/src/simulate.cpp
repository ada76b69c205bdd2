#include "spikecls/simulate.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "spikecls/csv.hpp"
#include "spikecls/parallel.hpp"
#include "spikecls/rng.hpp"

namespace spikecls {

namespace {

constexpr std::uint64_t kStreamLabel = 0x01;
constexpr std::uint64_t kStreamTrain = 0x02;
constexpr double kPriorFloor = 1e-6;

}  // namespace

int TrainingSet::count_class(ClassLabel label) const {
  int n = 0;
  for (const auto& s : samples)
    if (s.label == label) ++n;
  return n;
}

PoissonSampler::PoissonSampler(const IntensityModel& model, double T)
    : model_(model), window_T_(T) {
  if (!(T >= 0.0)) throw std::invalid_argument("PoissonSampler: T must be >= 0");
  const double sup = model.sup_bound(T);
  if (!std::isfinite(sup) || sup < 0.0)
    throw std::invalid_argument("PoissonSampler: rate unbounded on [0, T]");
  dominating_rate_ = sup * 1.001;
}

SpikeTrain PoissonSampler::draw(std::uint64_t seed) const {
  SpikeTrain train;
  train.window_T = window_T_;
  if (dominating_rate_ <= 0.0) return train;
  Rng rng(seed);
  double t = 0.0;
  for (;;) {
    t += rng.exponential(dominating_rate_);
    if (t > window_T_) break;
    if (rng.uniform() * dominating_rate_ < model_.eval(t))
      train.times.push_back(t);
  }
  enforce_strictly_increasing(train.times, window_T_);
  return train;
}

SpikeTrain sample_poisson(const IntensityModel& model, double T,
                          std::uint64_t seed) {
  return PoissonSampler(model, T).draw(seed);
}

void enforce_strictly_increasing(std::vector<double>& times, double T) {
  std::size_t out = 0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    double t = times[i];
    if (out > 0 && t <= times[out - 1])
      t = std::nextafter(times[out - 1], std::numeric_limits<double>::infinity());
    if (t > T) continue;
    times[out++] = t;
  }
  times.resize(out);
}

TrainingSet generate_training_set(const IntensityModel& lambda1,
                                  const IntensityModel& lambda2, double pi1,
                                  double pi2, int L, double T,
                                  std::uint64_t seed, int threads) {
  if (std::abs(pi1 + pi2 - 1.0) > 1e-12)
    throw std::invalid_argument("generate_training_set: priors must sum to 1");
  if (std::min(pi1, pi2) < kPriorFloor)
    throw std::invalid_argument(
        "generate_training_set: prior below 1e-6 floor");
  if (L < 1) throw std::invalid_argument("generate_training_set: L must be >= 1");

  const PoissonSampler sampler1(lambda1, T);
  const PoissonSampler sampler2(lambda2, T);

  TrainingSet out;
  out.samples.resize(static_cast<std::size_t>(L));
  out.window_T = T;
  out.pi1 = pi1;
  out.pi2 = pi2;
  out.seed = seed;

  parallel_for(L, resolve_threads(threads), [&](std::int64_t i) {
    Rng label_rng(derive_seed(seed, kStreamLabel, static_cast<std::uint64_t>(i)));
    const ClassLabel label =
        label_rng.uniform() < pi1 ? ClassLabel::omega1 : ClassLabel::omega2;
    const PoissonSampler& sampler =
        label == ClassLabel::omega1 ? sampler1 : sampler2;
    auto& slot = out.samples[static_cast<std::size_t>(i)];
    slot.label = label;
    slot.train = sampler.draw(derive_seed(seed, kStreamTrain, static_cast<std::uint64_t>(i)));
  });
  return out;
}

void write_dataset_csv(const TrainingSet& data, const std::string& events_path,
                       const std::string& manifest_path) {
  CsvWriter events(events_path);
  events.row({"sample_id", "label", "event_time"});
  for (std::size_t i = 0; i < data.samples.size(); ++i) {
    const auto& s = data.samples[i];
    const std::string label = std::to_string(static_cast<int>(s.label));
    for (double t : s.train.times)
      events.row({std::to_string(i), label, fmt_double(t)});
  }
  events.close();

  CsvWriter manifest(manifest_path);
  manifest.row({"T", "L", "seed"});
  manifest.row({fmt_double(data.window_T), std::to_string(data.samples.size()),
                std::to_string(data.seed)});
  manifest.row({"sample_id", "label", "n_events"});
  for (std::size_t i = 0; i < data.samples.size(); ++i) {
    const auto& s = data.samples[i];
    manifest.row({std::to_string(i), std::to_string(static_cast<int>(s.label)),
                  std::to_string(s.train.times.size())});
  }
  manifest.close();
}

TrainingSet read_dataset_csv(const std::string& events_path,
                             const std::string& manifest_path) {
  const auto manifest = read_csv(manifest_path);
  if (manifest.size() < 3 || manifest[0].size() != 3 || manifest[1].size() != 3)
    throw std::runtime_error("read_dataset_csv: malformed manifest");

  TrainingSet out;
  out.window_T = std::stod(manifest[1][0]);
  const std::size_t L = std::stoul(manifest[1][1]);
  out.seed = std::stoull(manifest[1][2]);
  out.samples.resize(L);
  for (std::size_t r = 3; r < manifest.size(); ++r) {
    const auto& row = manifest[r];
    if (row.size() != 3)
      throw std::runtime_error("read_dataset_csv: malformed manifest row");
    const std::size_t id = std::stoul(row[0]);
    if (id >= L) throw std::runtime_error("read_dataset_csv: sample_id out of range");
    out.samples[id].label = static_cast<ClassLabel>(std::stoi(row[1]));
    out.samples[id].train.window_T = out.window_T;
    out.samples[id].train.times.reserve(std::stoul(row[2]));
  }

  const auto events = read_csv(events_path);
  for (std::size_t r = 1; r < events.size(); ++r) {
    const auto& row = events[r];
    if (row.size() != 3)
      throw std::runtime_error("read_dataset_csv: malformed event row");
    const std::size_t id = std::stoul(row[0]);
    if (id >= L) throw std::runtime_error("read_dataset_csv: sample_id out of range");
    out.samples[id].train.times.push_back(std::stod(row[2]));
  }
  return out;
}

}  // namespace spikecls
