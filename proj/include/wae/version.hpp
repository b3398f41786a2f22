// Copyright 2026 The wae Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef WAE_VERSION_HPP
#define WAE_VERSION_HPP

namespace wae {

inline constexpr const char* kVersion = "0.1.0";

} // namespace wae

#endif // WAE_VERSION_HPP
