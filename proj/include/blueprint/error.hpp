/* SPDX-FileCopyrightText: 2026 Blueprint Field Authors
 *
 * SPDX-License-Identifier: Apache-2.0 */

#pragma once

#include <stdexcept>
#include <string>

namespace blueprint {

/// Raised for every contract violation in the library. The message is the
/// stable, user-facing reason ("invalid depth", "behind camera", ...).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace blueprint
