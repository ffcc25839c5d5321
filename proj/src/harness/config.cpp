#include "surveysim/harness/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "surveysim/backend/mock_backend.hpp"
#include "surveysim/survey/dataset.hpp"

namespace surveysim::harness {

namespace fs = std::filesystem;

namespace {

std::string where(const YAML::Node& node) {
    const auto mark = node.Mark();
    if (mark.is_null()) return "";
    return " (line " + std::to_string(mark.line + 1) + ")";
}

template <typename T>
T scalar(const YAML::Node& node, const std::string& what) {
    try {
        return node.as<T>();
    } catch (const YAML::Exception&) {
        throw ConfigError("invalid value for '" + what + "'" + where(node));
    }
}

std::string required_string(const YAML::Node& parent, const std::string& key, const std::string& context) {
    const auto node = parent[key];
    if (!node || node.IsNull()) throw ConfigError(context + ": missing '" + key + "'" + where(parent));
    return scalar<std::string>(node, context + "." + key);
}

std::vector<std::string> string_list(const YAML::Node& node, const std::string& what) {
    std::vector<std::string> out;
    if (!node || node.IsNull()) return out;
    if (node.IsScalar()) return {scalar<std::string>(node, what)};
    if (!node.IsSequence()) throw ConfigError("'" + what + "' must be a list" + where(node));
    for (const auto& item : node) out.push_back(scalar<std::string>(item, what));
    return out;
}

fs::path resolve(const fs::path& base, const std::string& path) {
    fs::path p(path);
    return p.is_absolute() ? p : base / p;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read '" + path.string() + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return text.str();
}

survey::AttributeKind parse_attribute_kind(const std::string& text) {
    if (text == "text") return survey::AttributeKind::text;
    if (text == "number") return survey::AttributeKind::number;
    if (text == "age") return survey::AttributeKind::age;
    throw ConfigError("unknown attribute kind '" + text + "'");
}

survey::SurveyQuestion parse_question(const YAML::Node& node, survey::Language language,
                                      std::map<std::string, std::string>& truth_columns) {
    survey::SurveyQuestion q;
    q.id = required_string(node, "id", "question");
    q.text = required_string(node, "text", "question " + q.id);
    q.language = language;
    if (node["scale"]) q.scale_kind = survey::parse_scale_kind(scalar<std::string>(node["scale"], "scale"));
    truth_columns[q.id] = node["truth_column"] ? scalar<std::string>(node["truth_column"], "truth_column") : q.id;
    const auto options = node["options"];
    if (!options || !options.IsSequence()) throw ConfigError("question " + q.id + ": 'options' must be a list");
    for (const auto& item : options) {
        survey::ResponseOption option;
        if (item.IsScalar()) {
            option.full_text = scalar<std::string>(item, "option");
            option.id = option.full_text;
        } else {
            option.full_text = required_string(item, "text", "option of " + q.id);
            option.id = item["id"] ? scalar<std::string>(item["id"], "option id") : option.full_text;
            option.aliases = string_list(item["aliases"], "aliases");
        }
        q.options.push_back(std::move(option));
    }
    try {
        q.validate();
    } catch (const survey::SurveyError& e) {
        throw ConfigError("question " + q.id + ": " + e.what());
    }
    return q;
}

DatasetConfig parse_dataset(const YAML::Node& node, const fs::path& base) {
    DatasetConfig out;
    auto& schema = out.schema;
    schema.id = required_string(node, "id", "dataset");
    const std::string context = "dataset " + schema.id;
    out.path = resolve(base, required_string(node, "path", context));
    if (node["language"]) schema.language = survey::parse_language(scalar<std::string>(node["language"], "language"));
    if (node["id_column"]) schema.id_column = scalar<std::string>(node["id_column"], "id_column");

    if (node["persona_template"]) {
        out.templates.persona = read_file(resolve(base, scalar<std::string>(node["persona_template"], "persona_template")));
        while (!out.templates.persona.empty() &&
               (out.templates.persona.back() == '\n' || out.templates.persona.back() == '\r'))
            out.templates.persona.pop_back();
    } else if (node["persona"]) {
        out.templates.persona = scalar<std::string>(node["persona"], "persona");
    } else {
        throw ConfigError(context + ": needs 'persona_template' or 'persona'");
    }
    if (node["sentence_marker"]) out.templates.sentence_marker = scalar<std::string>(node["sentence_marker"], "sentence_marker");

    for (const auto& item : node["attributes"]) {
        survey::AttributeSpec attr;
        if (item.IsScalar()) {
            attr.name = scalar<std::string>(item, "attribute");
        } else {
            attr.name = required_string(item, "name", context + " attribute");
            if (item["kind"]) attr.kind = parse_attribute_kind(scalar<std::string>(item["kind"], "kind"));
            if (item["column"]) attr.column = scalar<std::string>(item["column"], "column");
            if (item["value_map"]) {
                for (const auto& entry : item["value_map"])
                    attr.value_map[scalar<std::string>(entry.first, "value_map")] =
                        scalar<std::string>(entry.second, "value_map");
            }
        }
        if (attr.column.empty()) attr.column = attr.name;
        schema.attributes.push_back(std::move(attr));
    }
    schema.grouping_attributes = string_list(node["grouping"], "grouping");
    for (const auto& name : schema.grouping_attributes)
        if (!schema.attribute(name)) throw ConfigError(context + ": grouping attribute '" + name + "' is not declared");

    const auto questions = node["questions"];
    if (!questions || !questions.IsSequence() || questions.size() == 0)
        throw ConfigError(context + ": 'questions' must be a non-empty list");
    std::set<std::string> seen;
    for (const auto& item : questions) {
        auto q = parse_question(item, schema.language, schema.truth_columns);
        if (!seen.insert(q.id).second) throw ConfigError(context + ": duplicate question '" + q.id + "'");
        schema.questions.push_back(std::move(q));
    }
    return out;
}

BackendProfile parse_backend(const std::string& name, const YAML::Node& node, const fs::path& base) {
    BackendProfile profile;
    profile.name = name;
    const std::string kind = required_string(node, "kind", "backend " + name);
    if (kind == "mock") {
        profile.kind = BackendKind::mock;
        profile.mock_script = resolve(base, required_string(node, "script", "backend " + name));
    } else if (kind == "http") {
        profile.kind = BackendKind::http;
        auto& http = profile.http;
        http.url = required_string(node, "url", "backend " + name);
        http.model = required_string(node, "model", "backend " + name);
        if (node["dialect"]) {
            try {
                http.dialect = backend::dialect_by_name(scalar<std::string>(node["dialect"], "dialect"));
            } catch (const std::exception& e) {
                throw ConfigError("backend " + name + ": " + e.what());
            }
        }
        if (node["api_key_env"]) http.api_key_env = scalar<std::string>(node["api_key_env"], "api_key_env");
        if (node["max_in_flight"]) http.max_in_flight = scalar<int>(node["max_in_flight"], "max_in_flight");
        if (node["max_logprobs"]) http.max_logprobs = scalar<int>(node["max_logprobs"], "max_logprobs");
        if (node["timeout_s"])
            http.timeout = std::chrono::milliseconds(
                static_cast<long long>(scalar<double>(node["timeout_s"], "timeout_s") * 1000.0));
        if (node["max_attempts"]) http.max_attempts = scalar<int>(node["max_attempts"], "max_attempts");
        if (http.max_in_flight < 1) throw ConfigError("backend " + name + ": max_in_flight must be positive");
    } else {
        throw ConfigError("backend " + name + ": unknown kind '" + kind + "' (expected mock or http)");
    }
    return profile;
}

std::vector<methods::MethodId> parse_methods(const YAML::Node& node) {
    const auto names = string_list(node, "methods");
    if (names.empty() || (names.size() == 1 && names.front() == "all"))
        return {methods::kAllMethods.begin(), methods::kAllMethods.end()};
    std::vector<methods::MethodId> out;
    for (const auto& name : names) {
        try {
            out.push_back(methods::parse_method(name));
        } catch (const std::exception&) {
            throw ConfigError("unknown method '" + name + "'");
        }
    }
    return out;
}

std::vector<survey::ScaleVariant> parse_variants(const YAML::Node& node) {
    const auto names = string_list(node, "variants");
    if (names.empty() || (names.size() == 1 && names.front() == "all")) return survey::ScaleVariant::all();
    std::vector<survey::ScaleVariant> out;
    for (const auto& name : names) {
        try {
            out.push_back(survey::ScaleVariant::parse(name));
        } catch (const std::exception&) {
            throw ConfigError("unknown scale variant '" + name + "'");
        }
    }
    return out;
}

GridConfig parse_grid(const YAML::Node& node) {
    GridConfig grid;
    grid.methods = parse_methods(node["methods"]);
    grid.variants = parse_variants(node["variants"]);
    grid.questions = string_list(node["questions"], "questions");
    if (const auto decoding = node["decoding"]) {
        if (decoding["greedy"]) grid.greedy = scalar<bool>(decoding["greedy"], "greedy");
        for (const auto& seed : decoding["seeds"]) {
            const auto value = scalar<std::int64_t>(seed, "seeds");
            if (value < 0) throw ConfigError("seeds must be non-negative (negative values are reserved)");
            grid.seeds.push_back(value);
        }
        if (const auto sweep = decoding["sweep"]) {
            SweepConfig s;
            for (const auto& t : sweep["temperatures"]) s.temperatures.push_back(scalar<double>(t, "temperatures"));
            for (const auto& k : sweep["top_k"]) s.top_k.push_back(scalar<int>(k, "top_k"));
            if (s.temperatures.empty() || s.top_k.empty())
                throw ConfigError("sweep needs non-empty 'temperatures' and 'top_k'");
            for (double t : s.temperatures)
                if (t < 0) throw ConfigError("sweep temperatures must be non-negative");
            for (int k : s.top_k)
                if (k < 1) throw ConfigError("sweep top_k values must be positive");
            grid.sweep = std::move(s);
        }
    }
    if ((grid.sweep || !grid.seeds.empty()) == false && !grid.greedy)
        throw ConfigError("decoding selects no cells: enable greedy or list seeds");
    if (grid.sweep && grid.seeds.empty()) throw ConfigError("a sweep needs at least one seed");
    for (const auto& item : node["exclude"]) {
        Exclusion e;
        e.datasets = string_list(item["datasets"], "datasets");
        e.questions = string_list(item["questions"], "questions");
        e.models = string_list(item["models"], "models");
        e.methods = string_list(item["methods"], "methods");
        e.variants = string_list(item["variants"], "variants");
        e.decodings = string_list(item["decodings"], "decodings");
        grid.exclusions.push_back(std::move(e));
    }
    return grid;
}

}  // namespace

const DatasetConfig& RunConfig::dataset(const std::string& id) const {
    for (const auto& d : datasets)
        if (d.schema.id == id) return d;
    throw ConfigError("unknown dataset '" + id + "'");
}

const ModelConfig& RunConfig::model(const std::string& id) const {
    for (const auto& m : models)
        if (m.id == id) return m;
    throw ConfigError("unknown model '" + id + "'");
}

RunConfig parse_config(const std::string& yaml_text, const fs::path& base_dir) {
    YAML::Node root;
    try {
        root = YAML::Load(yaml_text);
    } catch (const YAML::Exception& e) {
        throw ConfigError(std::string("malformed YAML: ") + e.what());
    }
    if (!root.IsMap()) throw ConfigError("config must be a mapping");

    RunConfig config;
    std::set<std::string> ids;
    for (const auto& item : root["datasets"]) {
        config.datasets.push_back(parse_dataset(item, base_dir));
        if (!ids.insert(config.datasets.back().schema.id).second)
            throw ConfigError("duplicate dataset '" + config.datasets.back().schema.id + "'");
    }
    if (config.datasets.empty()) throw ConfigError("config declares no datasets");

    for (const auto& entry : root["backends"]) {
        const auto name = scalar<std::string>(entry.first, "backends");
        config.backends.emplace(name, parse_backend(name, entry.second, base_dir));
    }
    ids.clear();
    for (const auto& item : root["models"]) {
        ModelConfig model;
        model.id = required_string(item, "id", "model");
        model.backend = required_string(item, "backend", "model " + model.id);
        if (item["default_temperature"])
            model.default_temperature = scalar<double>(item["default_temperature"], "default_temperature");
        if (item["reasoning"]) model.reasoning = scalar<bool>(item["reasoning"], "reasoning");
        if (!config.backends.contains(model.backend))
            throw ConfigError("model " + model.id + ": unknown backend '" + model.backend + "'");
        if (!ids.insert(model.id).second) throw ConfigError("duplicate model '" + model.id + "'");
        config.models.push_back(std::move(model));
    }
    if (config.models.empty()) throw ConfigError("config declares no models");

    config.grid = parse_grid(root["grid"] ? root["grid"] : YAML::Node(YAML::NodeType::Map));
    for (const auto& q : config.grid.questions) {
        bool found = false;
        for (const auto& d : config.datasets)
            for (const auto& question : d.schema.questions) found = found || question.id == q;
        if (!found) throw ConfigError("grid question '" + q + "' is not declared by any dataset");
    }

    config.out_dir = resolve(base_dir, root["out_dir"] ? scalar<std::string>(root["out_dir"], "out_dir") : "out");
    if (root["max_in_flight"]) config.max_in_flight = scalar<int>(root["max_in_flight"], "max_in_flight");
    if (config.max_in_flight < 1) throw ConfigError("max_in_flight must be positive");
    if (root["logprobs_top_k"]) config.logprobs_top_k = scalar<int>(root["logprobs_top_k"], "logprobs_top_k");
    if (root["baseline_seed"]) config.baseline_seed = scalar<std::uint64_t>(root["baseline_seed"], "baseline_seed");
    if (root["threshold"]) config.threshold = scalar<double>(root["threshold"], "threshold");
    if (const auto mt = root["max_tokens"]) {
        if (mt["token"]) config.max_tokens.token = scalar<int>(mt["token"], "max_tokens.token");
        if (mt["restricted"]) config.max_tokens.restricted = scalar<int>(mt["restricted"], "max_tokens.restricted");
        if (mt["reasoning"]) config.max_tokens.reasoning = scalar<int>(mt["reasoning"], "max_tokens.reasoning");
        if (mt["open"]) config.max_tokens.open = scalar<int>(mt["open"], "max_tokens.open");
        if (mt["classify"]) config.max_tokens.classify = scalar<int>(mt["classify"], "max_tokens.classify");
    }
    return config;
}

RunConfig load_config(const fs::path& path) {
    auto config = parse_config(read_file(path), path.parent_path().empty() ? fs::path(".") : path.parent_path());
    config.source = path;
    return config;
}

void override_backend(RunConfig& config, const std::string& profile) {
    if (!config.backends.contains(profile)) throw ConfigError("unknown backend profile '" + profile + "'");
    for (auto& model : config.models) model.backend = profile;
}

std::vector<survey::Dataset> load_datasets(const RunConfig& config) {
    std::vector<survey::Dataset> out;
    for (const auto& d : config.datasets) out.push_back(survey::load_dataset(d.path, d.schema));
    return out;
}

std::map<std::string, std::shared_ptr<backend::Backend>> make_backends(const RunConfig& config,
                                                                        const std::vector<survey::Dataset>& datasets) {
    backend::TruthTable truths;
    for (const auto& dataset : datasets)
        for (const auto& r : dataset.respondents)
            for (const auto& [question, option] : r.ground_truth) truths[{question, r.id}] = option;

    std::map<std::string, std::shared_ptr<backend::Backend>> out;
    for (const auto& model : config.models) {
        if (out.contains(model.backend)) continue;
        const auto& profile = config.backends.at(model.backend);
        if (profile.kind == BackendKind::mock)
            out[model.backend] = std::make_shared<backend::MockBackend>(backend::load_mock_script(profile.mock_script),
                                                                        truths);
        else
            out[model.backend] = std::make_shared<backend::HttpBackend>(profile.http);
    }
    return out;
}

}  // namespace surveysim::harness
