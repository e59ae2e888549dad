#pragma once

#include "reskern/arc_cosine.hpp"
#include "reskern/conditioning.hpp"
#include "reskern/finite_width.hpp"
#include "reskern/general.hpp"
#include "reskern/linalg.hpp"
#include "reskern/multisphere.hpp"
#include "reskern/rng.hpp"
#include "reskern/spectral.hpp"
#include "reskern/types.hpp"
