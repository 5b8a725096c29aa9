// SPDX-License-Identifier: Apache-2.0
#include "eepn/version.hpp"

namespace eepn {

const char* version() { return EEPN_VERSION_STRING; }

}  // namespace eepn
