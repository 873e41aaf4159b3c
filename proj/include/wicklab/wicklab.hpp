#pragma once

#include "wicklab/besov.hpp"
#include "wicklab/error.hpp"
#include "wicklab/gmc.hpp"
#include "wicklab/hermite.hpp"
#include "wicklab/lattice_kernels.hpp"
#include "wicklab/parallel.hpp"
#include "wicklab/she.hpp"
#include "wicklab/spectral_json.hpp"
#include "wicklab/support_lab.hpp"
#include "wicklab/torus_fourier.hpp"
