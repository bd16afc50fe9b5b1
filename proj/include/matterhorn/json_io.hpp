#pragma once

#include <string>

#include <json.hpp>

#include "matterhorn/conversion.hpp"
#include "matterhorn/crossbar.hpp"
#include "matterhorn/energy.hpp"
#include "matterhorn/qnn.hpp"
#include "matterhorn/spike.hpp"

namespace matterhorn {

using Json = nlohmann::ordered_json;

/// Parses a file. Throws ConfigError naming the path on I/O or syntax errors.
Json load_json_file(const std::string& path);

Json to_json(const SpikeTrain& s);
/// 0/1 array of length T. `where` prefixes error messages.
SpikeTrain spike_train_from_json(const Json& j, const std::string& where);

/// Layer descriptor: {"n", "alpha_in", "alpha_out", "mode", "mu", "k",
/// "weights": C_i rows of C_o values, "bias": C_o values}. Input and output
/// share n and mode.
QnnLayer qnn_layer_from_json(const Json& j, const std::string& where);
Json to_json(const QnnLayer& layer);

/// {"rows", "cols", "g_on_uS", "g_off_uS", "v_read_V", "adc_lsb_A",
/// "rows_per_read", "gamma", "input_bits"}; every key optional.
MsuConfig msu_config_from_json(const Json& j, const std::string& where);
Json to_json(const MsuConfig& cfg);

/// Block shape {"batch", "seq", "hidden", "ffn", "heads", "d_k", "window",
/// "layers"}; missing keys keep the BERT-base values.
BlockDescriptor block_from_json(const Json& j, const std::string& where);
Json to_json(const BlockDescriptor& d);

/// Object of unit-energy overrides by parameter name.
EnergyParams energy_params_from_json(const Json& j, const std::string& where);

/// Object of component name to spike ratio; {"all": r} sets every component.
RateMap rates_from_json(const Json& j, const BlockDescriptor& desc, const std::string& where);

Json to_json(const EnergyReport& r);
Json to_json(const EquivalenceReport& r);
Json to_json(const SnnLayerConfig& cfg);

}  // namespace matterhorn
