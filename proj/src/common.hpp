// SPDX-License-Identifier: Apache-2.0
//
// beamrate - downlink multiuser beamforming evaluation for Massive MIMO-OFDM
// Copyright (C) 2026 beamrate developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef BEAMRATE_COMMON_HPP
#define BEAMRATE_COMMON_HPP

#include <stdexcept>
#include <string>

namespace beamrate
{

// Bad dimensions, angles, indices, configuration values.
class validation_error : public std::invalid_argument
{
  public:
    using std::invalid_argument::invalid_argument;
};

// Filesystem-level failures (missing file, unwritable path).
class io_error : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

// Malformed channel-file contents; the message names the offending field.
class format_error : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

// Numerically unusable input (rank deficiency, singular intermediates).
class numeric_error : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

// Exhaustive search asked for more subsets than the configured cap.
class budget_error : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

// A target rate lies above the scheme's interference-limited plateau.
class unreachable_rate_error : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

} // namespace beamrate

#endif
