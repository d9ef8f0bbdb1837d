#pragma once

#include <filesystem>
#include <string>

#include "support.hpp"

namespace testing {

// Two days of plays:
//   2021-06-01 19h  Bicep/Glue x2 (one exact duplicate dropped), Kelly Lee Owens/Jeanette
//   2021-06-01 23h  Brian Eno/An Ending (artist tags only), Unknown/Noise (no features)
//   2021-06-02 08h  Mystery/Untagged (features, no tags anywhere)
//   2021-06-02 19h  Kelly Lee Owens/Jeanette
// plus one unparsable scrobble line.
inline void write_small_fixture(const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_file(dir / "scrobbles.jsonl",
             "{\"ts\":1622574300,\"artist\":\"Bicep\",\"track\":\"Glue\"}\n"
             "{\"ts\":1622575200,\"artist\":\"Kelly Lee Owens\",\"track\":\"Jeanette\"}\n"
             "{\"ts\":1622576400,\"artist\":\"Bicep\",\"track\":\"Glue\"}\n"
             "{\"ts\":1622576400,\"artist\":\"Bicep\",\"track\":\"Glue\"}\n"
             "{not json\n"
             "{\"ts\":1622589000,\"artist\":\"Brian Eno\",\"track\":\"An Ending\"}\n"
             "{\"ts\":1622590200,\"artist\":\"Unknown\",\"track\":\"Noise\"}\n"
             "{\"ts\":1622660400,\"artist\":\"Kelly Lee Owens\",\"track\":\"Jeanette\"}\n"
             "{\"ts\":1622620800,\"artist\":\"Mystery\",\"track\":\"Untagged\"}\n");
  write_file(dir / "tags.jsonl",
             "{\"track_key\":\"bicep — glue\",\"tags\":[{\"tag\":\"electronic\",\"count\":100},"
             "{\"tag\":\"dance\",\"count\":60}]}\n"
             "{\"track_key\":\"kelly lee owens — jeanette\",\"tags\":[{\"tag\":\"electronic\",\"count\":100},"
             "{\"tag\":\"techno\",\"count\":40},{\"tag\":\"Electronic\",\"count\":50}]}\n"
             "{\"track_key\":\"unknown — noise\",\"tags\":[{\"tag\":\"noise\",\"count\":100}]}\n");
  write_file(dir / "artist_tags.jsonl",
             "{\"artist\":\"brian eno\",\"tags\":[{\"tag\":\"ambient\",\"count\":100},"
             "{\"tag\":\"electronic\",\"count\":20}]}\n");
  const auto features = [](double dance) {
    return "{\"acousticness\":0.1,\"danceability\":" + std::to_string(dance) +
           ",\"duration_ms\":240000,\"energy\":0.6,\"instrumentalness\":0.8,\"key\":5,\"liveness\":0.1,"
           "\"loudness\":-9.5,\"mode\":1,\"speechiness\":0.04,\"tempo\":122.0,\"valence\":0.3}";
  };
  write_file(dir / "features.jsonl",
             "{\"track_key\":\"bicep — glue\",\"features\":" + features(0.8) + "}\n" +
                 "{\"track_key\":\"kelly lee owens — jeanette\",\"features\":" + features(0.583) + "}\n" +
                 "{\"track_key\":\"brian eno — an ending\",\"features\":" + features(0.2) + "}\n" +
                 "{\"track_key\":\"unknown — noise\",\"features\":null}\n" +
                 "{\"track_key\":\"mystery — untagged\",\"features\":" + features(0.5) + "}\n");
}

}  // namespace testing
