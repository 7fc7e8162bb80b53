#pragma once

namespace archipelago {

/// Code version stamped into run manifests; bump on format changes.
inline constexpr const char* kVersion = "0.1.0";

}  // namespace archipelago
