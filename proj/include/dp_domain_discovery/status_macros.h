//
// Copyright 2026 The DP Domain Discovery Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef DP_DOMAIN_DISCOVERY_STATUS_MACROS_H_
#define DP_DOMAIN_DISCOVERY_STATUS_MACROS_H_

#include <utility>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

#define DPDD_STATUS_CONCAT_INNER_(a, b) a##b
#define DPDD_STATUS_CONCAT_(a, b) DPDD_STATUS_CONCAT_INNER_(a, b)

// Returns early from the enclosing function if `expr` is not OK.
#define DPDD_RETURN_IF_ERROR(expr)                 \
  do {                                             \
    const absl::Status _dpdd_status = (expr);      \
    if (!_dpdd_status.ok()) return _dpdd_status;   \
  } while (0)

#define DPDD_ASSIGN_OR_RETURN_IMPL_(statusor, lhs, rexpr) \
  auto statusor = (rexpr);                                \
  if (!statusor.ok()) return statusor.status();           \
  lhs = std::move(statusor).value()

// Evaluates `rexpr` (an absl::StatusOr<T>), returns its status on error and
// otherwise assigns the value to `lhs`.
#define DPDD_ASSIGN_OR_RETURN(lhs, rexpr) \
  DPDD_ASSIGN_OR_RETURN_IMPL_(            \
      DPDD_STATUS_CONCAT_(_dpdd_statusor_, __LINE__), lhs, rexpr)

#endif  // DP_DOMAIN_DISCOVERY_STATUS_MACROS_H_
