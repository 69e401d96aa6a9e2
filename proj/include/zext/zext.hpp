#pragma once

#include "zext/certificate.hpp"
#include "zext/error.hpp"
#include "zext/extension.hpp"
#include "zext/generators.hpp"
#include "zext/gf2.hpp"
#include "zext/graph.hpp"
#include "zext/harness.hpp"
#include "zext/instance.hpp"
#include "zext/io.hpp"
#include "zext/paths.hpp"
#include "zext/relaxation.hpp"
#include "zext/rng.hpp"
#include "zext/solvers.hpp"
#include "zext/spectral.hpp"
#include "zext/split.hpp"
