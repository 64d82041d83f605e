#pragma once

#include "relcloud/availability.hpp"
#include "relcloud/baseline_place.hpp"
#include "relcloud/compat_oracle.hpp"
#include "relcloud/dsr.hpp"
#include "relcloud/errors.hpp"
#include "relcloud/exact_place.hpp"
#include "relcloud/harness.hpp"
#include "relcloud/infrastructure.hpp"
#include "relcloud/io.hpp"
#include "relcloud/network.hpp"
#include "relcloud/placement.hpp"
#include "relcloud/routing.hpp"
