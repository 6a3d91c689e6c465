#pragma once

#include "edg/core/cg.hpp"
#include "edg/core/errors.hpp"
#include "edg/core/linop.hpp"
#include "edg/core/logdet.hpp"
#include "edg/core/operator_norm.hpp"
#include "edg/core/rng.hpp"
#include "edg/core/spectral_state.hpp"
#include "edg/core/sym_matrix.hpp"
#include "edg/core/truncated_eig.hpp"
#include "edg/core/types.hpp"

#include "edg/basis/basis.hpp"
#include "edg/basis/coherence.hpp"
#include "edg/basis/measurement.hpp"
#include "edg/basis/sample_set.hpp"
#include "edg/basis/sampling_operator.hpp"

#include "edg/tangent/tangent.hpp"

#include "edg/irls/compact_iterate.hpp"
#include "edg/irls/matrix_irls.hpp"
#include "edg/irls/weight.hpp"
#include "edg/irls/wls.hpp"

#include "edg/geometry/geometry.hpp"

#include "edg/dataio/generators.hpp"
#include "edg/dataio/io.hpp"
