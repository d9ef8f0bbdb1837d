#include "momentrec/ingestion/api_config.hpp"

#include <cmath>
#include <cstdlib>

#include "momentrec/core/error.hpp"

namespace momentrec::ingestion {

void ApiConfig::load_credentials_from_env() {
  const auto read = [](const char* name, std::string& out) {
    if (const char* v = std::getenv(name)) out = v;
  };
  read("LASTFM_API_KEY", lastfm_api_key);
  read("SPOTIFY_CLIENT_ID", spotify_client_id);
  read("SPOTIFY_CLIENT_SECRET", spotify_client_secret);
}

void ApiConfig::validate() const {
  if (!(rate_limit_per_sec > 0.0) || !std::isfinite(rate_limit_per_sec)) {
    throw ValidationError("rate_limit_per_sec must be > 0");
  }
  if (mode == Mode::live) {
    if (lastfm_api_key.empty()) throw ValidationError("live mode needs LASTFM_API_KEY");
    if (lastfm_user.empty()) throw ValidationError("live mode needs a Last.fm user");
    if (spotify_client_id.empty() || spotify_client_secret.empty()) {
      throw ValidationError("live mode needs SPOTIFY_CLIENT_ID and SPOTIFY_CLIENT_SECRET");
    }
  } else if (fixtures_dir.empty()) {
    throw ValidationError("offline mode needs a fixtures directory");
  }
}

}  // namespace momentrec::ingestion
