#pragma once

#include <cstddef>
#include <cstdint>

#include "puw/bytes.hpp"

namespace puw {

// SHA-256 one-shot. Reuses a thread-local digest context internally: the
// mining loops hash ~1e7/s per core and per-call context setup dominates
// otherwise.
Digest sha256(const std::uint8_t* data, std::size_t len);

inline Digest sha256(const std::vector<std::uint8_t>& v) { return sha256(v.data(), v.size()); }

}  // namespace puw
