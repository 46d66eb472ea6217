#ifndef KRC_KRC_HPP
#define KRC_KRC_HPP

#include "krc/assignment.hpp"
#include "krc/centroid.hpp"
#include "krc/error.hpp"
#include "krc/generators.hpp"
#include "krc/ingest.hpp"
#include "krc/kmc.hpp"
#include "krc/krca.hpp"
#include "krc/random.hpp"
#include "krc/ranking.hpp"
#include "krc/theory.hpp"

#endif
