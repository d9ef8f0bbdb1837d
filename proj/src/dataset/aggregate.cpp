#include <cmath>
#include <random>
#include <algorithm>
#include <unordered_map>

#include "momentrec/core/error.hpp"
#include "momentrec/dataset/dataset.hpp"
#include "momentrec/simd/kernels.hpp"

namespace momentrec::dataset {

std::size_t MomentsDataset::non_degenerate_count() const {
  return static_cast<std::size_t>(
      std::count_if(samples.begin(), samples.end(), [](const MomentSample& s) { return !s.degenerate(); }));
}

TagVocabulary select_top_tags(std::span<const TrackRecord> tracks, const std::map<std::string, std::size_t>& plays,
                              std::size_t k) {
  if (k == 0) throw ValidationError("vocabulary size k must be >= 1");
  std::unordered_map<std::string, long long> score;
  for (const TrackRecord& track : tracks) {
    const auto it = plays.find(track.track_key);
    const long long weight = it == plays.end() ? 1 : static_cast<long long>(it->second);
    if (weight == 0) continue;
    for (const TagAssignment& t : track.tags) score[t.tag] += weight * t.count;
  }
  if (score.empty()) throw Error("empty tag universe");

  std::vector<std::pair<std::string, long long>> ranked(score.begin(), score.end());
  const std::size_t keep = std::min(k, ranked.size());
  const auto better = [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  };
  std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(keep), ranked.end(), better);
  std::vector<std::string> names;
  names.reserve(keep);
  for (std::size_t i = 0; i < keep; ++i) names.push_back(std::move(ranked[i].first));
  return TagVocabulary(std::move(names));
}

TagVocabulary select_top_tags(std::span<const TrackRecord> tracks, std::size_t k) {
  return select_top_tags(tracks, {}, k);
}

std::vector<double> aggregate_tag_strengths(std::span<const PlayRef> plays, const TagVocabulary& vocab) {
  std::vector<double> raw(vocab.size(), 0.0);
  for (const PlayRef& play : plays) {
    for (const TagAssignment& t : play.track->tags) {
      if (auto idx = vocab.index_of(t.tag)) raw[*idx] += t.count;
    }
  }
  return raw;
}

NormalizedMoment normalize_moment(std::span<const double> raw) {
  NormalizedMoment out;
  out.strengths.assign(raw.size(), 0.0);
  const double total = simd::sum(raw);
  if (!(total > 0.0)) {
    out.degenerate = true;
    return out;
  }
  simd::scale(raw, kMomentMass / total, out.strengths);
  return out;
}

std::optional<FeatureRow> aggregate_features(std::span<const PlayRef> plays) {
  FeatureRow sum{};
  std::size_t n = 0;
  for (const PlayRef& play : plays) {
    if (!play.track->features) continue;
    const FeatureRow row = play.track->features->as_row();
    for (std::size_t i = 0; i < kFeatureCount; ++i) sum[i] += row[i];
    ++n;
  }
  if (n == 0) return std::nullopt;
  for (double& v : sum) v /= static_cast<double>(n);
  return sum;
}

MomentsDataset build_dataset(const IngestedData& data, const BuildOptions& options) {
  if (data.scrobbles.empty()) throw Error("cannot build a dataset from an empty cache");

  // Tracks without audio features are dropped from every downstream step.
  std::vector<PlayRef> plays;
  std::map<std::string, std::size_t> play_counts;
  for (const Scrobble& s : data.scrobbles) {
    const auto it = data.tracks.find(s.track_key);
    if (it == data.tracks.end() || !it->second.features) continue;
    plays.push_back(PlayRef{&s, &it->second});
    ++play_counts[s.track_key];
  }
  if (plays.empty()) throw Error("no playback has audio features; nothing to build");

  std::vector<TrackRecord> featured;
  for (const auto& [key, count] : play_counts) featured.push_back(data.tracks.at(key));

  MomentsDataset ds;
  ds.target_feature = options.target;
  ds.vocabulary = select_top_tags(featured, play_counts, options.k);

  std::map<MomentKey, std::vector<PlayRef>> intervals;
  for (const PlayRef& p : plays) {
    intervals[moment_key_of(p.scrobble->played_at, options.tz_offset_minutes)].push_back(p);
  }

  ds.samples.reserve(intervals.size());
  for (const auto& [key, group] : intervals) {
    auto features = aggregate_features(group);
    if (!features) continue;
    NormalizedMoment row = normalize_moment(aggregate_tag_strengths(group, ds.vocabulary));
    ds.samples.push_back(MomentSample{key, std::move(row.strengths), *features});
  }
  return ds;
}

DatasetSplit split_indices(std::size_t n, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction <= 1.0)) {
    throw ValidationError("train_fraction must be in (0, 1]");
  }
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  const auto n_train = static_cast<std::size_t>(std::floor(train_fraction * static_cast<double>(n) + 1e-9));
  DatasetSplit split;
  split.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  split.test.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

DatasetSplit split_dataset(const MomentsDataset& ds, double train_fraction, std::uint64_t seed,
                           bool include_degenerate) {
  std::vector<std::size_t> eligible;
  for (std::size_t i = 0; i < ds.samples.size(); ++i) {
    if (include_degenerate || !ds.samples[i].degenerate()) eligible.push_back(i);
  }
  DatasetSplit local = split_indices(eligible.size(), train_fraction, seed);
  for (auto& i : local.train) i = eligible[i];
  for (auto& i : local.test) i = eligible[i];
  return local;
}

Design make_design(const MomentsDataset& ds, std::span<const std::size_t> rows, Feature target) {
  Design d{Matrix(rows.size(), ds.vocabulary.size()), std::vector<double>(rows.size())};
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const MomentSample& s = ds.samples.at(rows[r]);
    std::copy(s.tag_strengths.begin(), s.tag_strengths.end(), d.x.row(r).begin());
    d.y[r] = s.features[index_of(target)];
  }
  return d;
}

Design make_design(const MomentsDataset& ds, std::span<const std::size_t> rows) {
  return make_design(ds, rows, ds.target_feature);
}

}  // namespace momentrec::dataset
