#ifndef ADSSM_CHECKPOINT_HPP
#define ADSSM_CHECKPOINT_HPP

#include <string>

#include "adssm/params.hpp"

namespace adssm::training {
struct TrainState;
}

namespace adssm::checkpoint {

// Binary layout: magic "ADSSMCKP", u32 version, dims as five i32, u64
// tensor count, then per tensor: u32 name length, name bytes, u32 rank,
// i64 dims, row-major little-endian f64 payload. Round-trips bit-exact.

void save_params(const std::string& path, const model::ParameterSet& params);
model::ParameterSet load_params(const std::string& path);

void save_train_state(const std::string& path, const training::TrainState& state);
training::TrainState load_train_state(const std::string& path);

}  // namespace adssm::checkpoint

#endif
