#pragma once

#include "alertfp/error.hpp"
#include "alertfp/alert_model.hpp"
#include "alertfp/ingest.hpp"
#include "alertfp/parallel.hpp"
#include "alertfp/miner.hpp"
#include "alertfp/scorer.hpp"
#include "alertfp/classifier_store.hpp"
#include "alertfp/eval.hpp"
