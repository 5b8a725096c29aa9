// SPDX-License-Identifier: Apache-2.0
#pragma once

namespace eepn {

/// Library version, "major.minor.patch".
const char* version();

}  // namespace eepn
