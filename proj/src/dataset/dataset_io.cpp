#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "momentrec/core/error.hpp"
#include "momentrec/core/format.hpp"
#include "momentrec/dataset/csv.hpp"
#include "momentrec/dataset/dataset.hpp"
#include "momentrec/ingestion/ingest.hpp"

namespace momentrec::dataset {
namespace {

namespace fs = std::filesystem;

struct CsvTable {
  std::vector<std::string> header;
  std::map<std::string, std::vector<std::string>> rows;  // keyed by first column
};

CsvTable read_table(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) throw FormatError(path.string() + " is empty");
  table.header = csv::split_line(line);
  if (table.header.empty() || table.header.front() != "timestamp") {
    throw FormatError(path.string() + ": first column must be 'timestamp'");
  }
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    auto fields = csv::split_line(line);
    if (fields.size() != table.header.size()) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                        std::to_string(table.header.size()) + " fields, got " + std::to_string(fields.size()));
    }
    std::string key = fields.front();
    if (!table.rows.emplace(key, std::move(fields)).second) {
      throw FormatError(path.string() + ": duplicate timestamp " + key);
    }
  }
  return table;
}

}  // namespace

MomentsDataset build_dataset(const std::filesystem::path& cache_dir, const BuildOptions& options) {
  return build_dataset(ingestion::load_ingested(cache_dir), options);
}

void write_dataset(const MomentsDataset& ds, const std::filesystem::path& dir) {
  fs::create_directories(dir);
  {
    std::ofstream out(dir / kTagsFile, std::ios::binary);
    if (!out) throw Error("cannot write " + (dir / kTagsFile).string());
    out << csv::quote("timestamp");
    for (const auto& name : ds.vocabulary.names()) out << ',' << csv::quote(name);
    out << '\n';
    for (const MomentSample& s : ds.samples) {
      out << s.key.to_string();
      for (double v : s.tag_strengths) out << ',' << format_double(v);
      out << '\n';
    }
  }
  {
    std::ofstream out(dir / kFeaturesFile, std::ios::binary);
    if (!out) throw Error("cannot write " + (dir / kFeaturesFile).string());
    out << csv::quote("timestamp");
    for (Feature f : all_features()) out << ',' << csv::quote(feature_name(f));
    out << '\n';
    for (const MomentSample& s : ds.samples) {
      out << s.key.to_string();
      for (double v : s.features) out << ',' << format_double(v);
      out << '\n';
    }
  }
  std::ofstream meta(dir / kMetaFile, std::ios::binary);
  meta << nlohmann::json{{"target_feature", feature_name(ds.target_feature)},
                         {"vocabulary_size", ds.vocabulary.size()},
                         {"samples", ds.samples.size()}}
              .dump(2)
       << '\n';
}

MomentsDataset read_dataset(const std::filesystem::path& dir) {
  const CsvTable tags = read_table(dir / kTagsFile);
  const CsvTable features = read_table(dir / kFeaturesFile);

  std::vector<std::string> offenders;
  for (const auto& [key, row] : tags.rows) {
    if (!features.rows.contains(key)) offenders.push_back(key);
  }
  for (const auto& [key, row] : features.rows) {
    if (!tags.rows.contains(key)) offenders.push_back(key);
  }
  if (!offenders.empty()) {
    std::sort(offenders.begin(), offenders.end());
    std::string msg = "timestamp join mismatch between tags and features files:";
    for (const auto& o : offenders) msg += " " + o;
    throw JoinError(msg, offenders);
  }

  if (features.header.size() != kFeatureCount + 1) throw FormatError("features file must have 12 feature columns");
  for (std::size_t i = 0; i < kFeatureCount; ++i) {
    if (features.header[i + 1] != feature_name(static_cast<Feature>(i))) {
      throw FormatError("unexpected feature column '" + features.header[i + 1] + "'");
    }
  }

  MomentsDataset ds;
  ds.vocabulary = TagVocabulary(std::vector<std::string>(tags.header.begin() + 1, tags.header.end()));
  if (std::ifstream meta_in(dir / kMetaFile); meta_in) {
    const auto meta = nlohmann::json::parse(meta_in, nullptr, false);
    if (!meta.is_discarded() && meta.contains("target_feature")) {
      const auto f = feature_from_name(meta.at("target_feature").get<std::string>());
      if (!f) throw FormatError("unknown target feature in dataset metadata");
      ds.target_feature = *f;
    }
  }

  ds.samples.reserve(tags.rows.size());
  for (const auto& [key, row] : tags.rows) {
    MomentSample s;
    s.key = MomentKey::parse(key);
    s.tag_strengths.reserve(row.size() - 1);
    for (std::size_t i = 1; i < row.size(); ++i) s.tag_strengths.push_back(parse_double(row[i]));
    const auto& frow = features.rows.at(key);
    for (std::size_t i = 0; i < kFeatureCount; ++i) s.features[i] = parse_double(frow[i + 1]);
    ds.samples.push_back(std::move(s));
  }
  // The canonical text form sorts the same as the key itself.
  return ds;
}

}  // namespace momentrec::dataset
