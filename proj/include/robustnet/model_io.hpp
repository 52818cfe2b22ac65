#pragma once

#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "robustnet/network.hpp"

namespace robustnet {

namespace detail {

inline std::string optimizer_name(Optimizer opt) {
    return opt == Optimizer::Adam ? "adam" : "sgd-momentum";
}

inline Optimizer parse_optimizer(const std::string& name) {
    if (name == "adam") return Optimizer::Adam;
    if (name == "sgd-momentum") return Optimizer::SgdMomentum;
    throw std::invalid_argument("unknown optimizer \"" + name +
                                "\" (expected adam or sgd-momentum)");
}

}  // namespace detail

// One structured-text document per model: architecture, optimizer settings,
// seed, label, standardizer statistics and every weight/bias value. Numbers
// are written in round-trip-exact decimal form.
inline void save_model(const TrainedModel& model, const std::filesystem::path& path) {
    nlohmann::json doc;
    doc["format"] = "robustnet-model-v1";
    doc["label"] = model.label;
    doc["final_loss"] = model.final_loss;
    doc["config"] = {
        {"layer_sizes", model.config.layer_sizes},
        {"hidden_dropout", model.config.hidden_dropout},
        {"activation", "relu"},
    };
    doc["training"] = {
        {"epochs", model.train_config.epochs},
        {"batch_size", model.train_config.batch_size},
        {"learning_rate", model.train_config.learning_rate},
        {"optimizer", detail::optimizer_name(model.train_config.optimizer)},
        {"seed", model.train_config.seed},
    };
    doc["standardizer"] = {
        {"means", model.standardizer.means},
        {"stds", model.standardizer.stds},
    };
    nlohmann::json layers = nlohmann::json::array();
    for (std::size_t k = 0; k < model.params.weights.size(); ++k) {
        const Matrix& w = model.params.weights[k];
        nlohmann::json weight_rows = nlohmann::json::array();
        for (std::size_t i = 0; i < w.rows(); ++i) {
            nlohmann::json row = nlohmann::json::array();
            for (std::size_t j = 0; j < w.cols(); ++j) row.push_back(w(i, j));
            weight_rows.push_back(std::move(row));
        }
        nlohmann::json bias = nlohmann::json::array();
        for (std::size_t j = 0; j < model.params.biases[k].cols(); ++j) {
            bias.push_back(model.params.biases[k](0, j));
        }
        layers.push_back({{"weights", std::move(weight_rows)}, {"bias", std::move(bias)}});
    }
    doc["layers"] = std::move(layers);

    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("save_model: cannot open " + path.string() + " for writing");
    }
    out << doc.dump(1) << '\n';
    if (!out.good()) {
        throw std::runtime_error("save_model: write failed for " + path.string());
    }
}

inline TrainedModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("load_model: cannot open " + path.string());
    }
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("load_model: " + path.string() + ": " + e.what());
    }
    try {
        if (doc.at("format").get<std::string>() != "robustnet-model-v1") {
            throw std::runtime_error("unrecognized format tag");
        }
        NetworkConfig config;
        config.layer_sizes = doc.at("config").at("layer_sizes").get<std::vector<std::size_t>>();
        config.hidden_dropout = doc.at("config").at("hidden_dropout").get<double>();
        config.activation = Activation::ReLU;
        validate_network_config(config);

        TrainConfig tc;
        const auto& training = doc.at("training");
        tc.epochs = training.at("epochs").get<std::size_t>();
        tc.batch_size = training.at("batch_size").get<std::size_t>();
        tc.learning_rate = training.at("learning_rate").get<double>();
        tc.optimizer = detail::parse_optimizer(training.at("optimizer").get<std::string>());
        tc.seed = training.at("seed").get<std::uint64_t>();

        StandardizerStats stats;
        stats.means = doc.at("standardizer").at("means").get<std::vector<double>>();
        stats.stds = doc.at("standardizer").at("stds").get<std::vector<double>>();
        if (stats.means.size() != stats.stds.size() ||
            stats.means.size() != config.layer_sizes.front()) {
            throw std::runtime_error("standardizer dimension does not match input width");
        }

        Parameters params;
        const auto& layers = doc.at("layers");
        if (layers.size() != config.layer_sizes.size() - 1) {
            throw std::runtime_error("layer count does not match architecture");
        }
        for (std::size_t k = 0; k < layers.size(); ++k) {
            const auto& weight_rows = layers[k].at("weights");
            const std::size_t rows = config.layer_sizes[k];
            const std::size_t cols = config.layer_sizes[k + 1];
            if (weight_rows.size() != rows) {
                throw std::runtime_error("weight row count mismatch in layer " +
                                         std::to_string(k));
            }
            Matrix w(rows, cols);
            for (std::size_t i = 0; i < rows; ++i) {
                if (weight_rows[i].size() != cols) {
                    throw std::runtime_error("weight column count mismatch in layer " +
                                             std::to_string(k));
                }
                for (std::size_t j = 0; j < cols; ++j) w(i, j) = weight_rows[i][j].get<double>();
            }
            const auto& bias_values = layers[k].at("bias");
            if (bias_values.size() != cols) {
                throw std::runtime_error("bias size mismatch in layer " + std::to_string(k));
            }
            Matrix b(1, cols);
            for (std::size_t j = 0; j < cols; ++j) b(0, j) = bias_values[j].get<double>();
            params.weights.push_back(std::move(w));
            params.biases.push_back(std::move(b));
        }

        return TrainedModel{std::move(config),
                            tc,
                            std::move(params),
                            std::move(stats),
                            doc.at("label").get<std::string>(),
                            doc.at("final_loss").get<double>()};
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("load_model: " + path.string() + ": malformed document: " +
                                 e.what());
    }
}

}  // namespace robustnet
