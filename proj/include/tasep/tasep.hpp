#pragma once

#include "airy.hpp"
#include "airy1.hpp"
#include "contour.hpp"
#include "csv.hpp"
#include "errors.hpp"
#include "fredholm.hpp"
#include "gauss.hpp"
#include "kernel.hpp"
#include "krawtchouk.hpp"
#include "linalg.hpp"
#include "logbinom.hpp"
#include "query.hpp"
#include "rng.hpp"
#include "roots.hpp"
#include "scaling.hpp"
#include "simulate.hpp"
