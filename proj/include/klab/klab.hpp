#pragma once

#include "klab/logtower.hpp"
#include "klab/seqvector.hpp"
#include "klab/parallel.hpp"
#include "klab/certificate.hpp"
#include "klab/koethe.hpp"
#include "klab/checks.hpp"
#include "klab/subalgebra.hpp"
#include "klab/smoothops.hpp"
#include "klab/constructions.hpp"
#include "klab/random.hpp"
#include "klab/io.hpp"
