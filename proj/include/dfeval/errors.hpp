// SPDX-License-Identifier: Apache-2.0
//
// dfeval - statistical evaluation toolkit for direction-finding antennas
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <stdexcept>

namespace dfeval {

/// Numerical pathology (eigensolver non-convergence and the like), as
/// opposed to input or configuration errors.
class NumericalError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

} // namespace dfeval
