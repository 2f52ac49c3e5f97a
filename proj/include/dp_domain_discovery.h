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

// Convenience header pulling in the whole library.

#ifndef DP_DOMAIN_DISCOVERY_DP_DOMAIN_DISCOVERY_H_
#define DP_DOMAIN_DISCOVERY_DP_DOMAIN_DISCOVERY_H_

#include "dp_domain_discovery/calibration.h"
#include "dp_domain_discovery/dataset.h"
#include "dp_domain_discovery/harness.h"
#include "dp_domain_discovery/mechanisms.h"
#include "dp_domain_discovery/metrics.h"
#include "dp_domain_discovery/random.h"
#include "dp_domain_discovery/version.h"

#endif  // DP_DOMAIN_DISCOVERY_DP_DOMAIN_DISCOVERY_H_
