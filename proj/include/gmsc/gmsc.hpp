#pragma once

// Umbrella header.

#include "gmsc/asymptotics.hpp"
#include "gmsc/centralized.hpp"
#include "gmsc/curves.hpp"
#include "gmsc/distributed.hpp"
#include "gmsc/gen_bound.hpp"
#include "gmsc/io.hpp"
#include "gmsc/model.hpp"
#include "gmsc/oracle.hpp"
#include "gmsc/verify.hpp"
