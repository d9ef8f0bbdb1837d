#pragma once

#include <filesystem>
#include <string>

namespace momentrec::ingestion {

enum class Mode { live, offline };

struct ApiConfig {
  std::string lastfm_api_key;
  std::string lastfm_user;
  std::string spotify_client_id;
  std::string spotify_client_secret;
  double rate_limit_per_sec = 5.0;
  std::filesystem::path cache_dir;
  std::filesystem::path fixtures_dir;  // offline mode only
  Mode mode = Mode::offline;

  std::string lastfm_base_url = "https://ws.audioscrobbler.com/2.0/";
  std::string spotify_api_url = "https://api.spotify.com/v1";
  std::string spotify_token_url = "https://accounts.spotify.com/api/token";

  // Fills credentials from LASTFM_API_KEY, SPOTIFY_CLIENT_ID and SPOTIFY_CLIENT_SECRET.
  void load_credentials_from_env();

  // Throws ValidationError when live mode lacks credentials or the rate is invalid.
  void validate() const;
};

}  // namespace momentrec::ingestion
