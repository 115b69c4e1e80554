#include "psrsim/traffic.hpp"

#include <stdexcept>

namespace psrsim {

std::vector<int> segment_msdus(std::int64_t file_bytes) {
  if (file_bytes <= 0) {
    throw std::invalid_argument("file size must be positive");
  }
  std::vector<int> msdus;
  msdus.reserve(static_cast<std::size_t>((file_bytes + kMsduMaxBytes - 1) /
                                         kMsduMaxBytes));
  std::int64_t left = file_bytes;
  while (left > 0) {
    const int chunk = static_cast<int>(std::min<std::int64_t>(left, kMsduMaxBytes));
    msdus.push_back(chunk);
    left -= chunk;
  }
  return msdus;
}

double per_sta_file_rate_hz(double aggregate_load_mbps, int n_stas,
                            std::int64_t file_bytes) {
  if (n_stas <= 0 || aggregate_load_mbps <= 0.0) return 0.0;
  return aggregate_load_mbps * 1e6 /
         (static_cast<double>(n_stas) * static_cast<double>(file_bytes) * 8.0);
}

}  // namespace psrsim
