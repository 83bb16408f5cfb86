// Copyright 2026 The Aggloc Authors
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

#ifndef AGGLOC_STATUS_MACROS_H_
#define AGGLOC_STATUS_MACROS_H_

#include "absl/status/status.h"
#include "absl/status/statusor.h"

#define AGGLOC_STATUS_CONCAT_INNER_(a, b) a##b
#define AGGLOC_STATUS_CONCAT_(a, b) AGGLOC_STATUS_CONCAT_INNER_(a, b)

#define AGGLOC_RETURN_IF_ERROR(expr)              \
  do {                                            \
    const ::absl::Status _aggloc_status = (expr); \
    if (!_aggloc_status.ok()) {                   \
      return _aggloc_status;                      \
    }                                             \
  } while (0)

#define AGGLOC_ASSIGN_OR_RETURN_IMPL_(statusor, lhs, rexpr) \
  auto statusor = (rexpr);                                  \
  if (!statusor.ok()) {                                     \
    return std::move(statusor).status();                    \
  }                                                         \
  lhs = *std::move(statusor)

#define AGGLOC_ASSIGN_OR_RETURN(lhs, rexpr)                                  \
  AGGLOC_ASSIGN_OR_RETURN_IMPL_(                                             \
      AGGLOC_STATUS_CONCAT_(_aggloc_statusor_, __LINE__), lhs, rexpr)

#endif  // AGGLOC_STATUS_MACROS_H_
