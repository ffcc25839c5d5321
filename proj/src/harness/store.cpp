#include "surveysim/harness/store.hpp"

#include <algorithm>
#include <iterator>

namespace surveysim::harness {

namespace fs = std::filesystem;

namespace {

std::string sanitize(const std::string& text) {
    std::string out;
    for (char c : text) {
        const bool keep = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' ||
                          c == '.' || c == '_';
        out += keep ? c : '_';
    }
    return out;
}

std::vector<fs::path> shard_files(const fs::path& directory) {
    std::vector<fs::path> files;
    if (!fs::exists(directory)) return files;
    for (const auto& entry : fs::directory_iterator(directory))
        if (entry.is_regular_file() && entry.path().extension() == ".jsonl") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    return files;
}

// Cuts the file back to its last complete line.
void drop_torn_tail(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (content.empty() || content.back() == '\n') return;
    const auto last_newline = content.find_last_of('\n');
    const auto keep = last_newline == std::string::npos ? 0 : last_newline + 1;
    in.close();
    fs::resize_file(path, keep);
}

template <typename Fn>
void for_each_line(const fs::path& path, Fn&& fn) {
    std::ifstream in(path, std::ios::binary);
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (line.empty()) continue;
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw StoreError(path.string() + ":" + std::to_string(number) + ": unreadable record: " + e.what());
        }
        fn(doc, path, number);
    }
}

}  // namespace

RecordStore::RecordStore(fs::path directory) : directory_(std::move(directory)) {
    std::error_code ec;
    fs::create_directories(directory_, ec);
    if (ec) throw StoreError("cannot create record directory '" + directory_.string() + "': " + ec.message());
    for (const auto& file : shard_files(directory_)) {
        drop_torn_tail(file);
        for_each_line(file, [&](const nlohmann::json& doc, const fs::path& path, std::size_t number) {
            if (!doc.contains("key") || !doc["key"].is_string())
                throw StoreError(path.string() + ":" + std::to_string(number) + ": record without key");
            keys_.insert(doc["key"].get<std::string>());
        });
    }
}

RecordStore::~RecordStore() = default;

std::string RecordStore::shard_name(const std::string& dataset_id, const std::string& model_id) {
    return sanitize(dataset_id) + "__" + sanitize(model_id) + ".jsonl";
}

bool RecordStore::contains(const std::string& key) const {
    std::lock_guard lock(mutex_);
    return keys_.contains(key);
}

std::size_t RecordStore::size() const {
    std::lock_guard lock(mutex_);
    return keys_.size();
}

RecordStore::Shard& RecordStore::shard_for(const std::string& name) {
    std::lock_guard lock(mutex_);
    auto& slot = shards_[name];
    if (!slot) {
        auto shard = std::make_unique<Shard>();
        shard->out.open(directory_ / name, std::ios::binary | std::ios::app);
        if (!shard->out) throw StoreError("cannot open shard '" + (directory_ / name).string() + "'");
        slot = std::move(shard);
    }
    return *slot;
}

void RecordStore::append(const methods::RunRecord& record) {
    {
        std::lock_guard lock(mutex_);
        if (!keys_.insert(record.key).second) return;
    }
    const std::string line = record.to_json().dump() + "\n";
    auto& shard = shard_for(shard_name(record.spec.dataset_id, record.spec.model_id));
    std::lock_guard lock(shard.mutex);
    shard.out.write(line.data(), static_cast<std::streamsize>(line.size()));
    shard.out.flush();
    if (!shard.out) {
        std::lock_guard index_lock(mutex_);
        keys_.erase(record.key);
        throw StoreError("write to record shard failed");
    }
}

std::vector<methods::RunRecord> RecordStore::load_all() const {
    std::map<std::string, methods::RunRecord> records;
    for (const auto& file : shard_files(directory_)) {
        for_each_line(file, [&](const nlohmann::json& doc, const fs::path& path, std::size_t number) {
            try {
                auto record = methods::RunRecord::from_json(doc);
                records.try_emplace(record.key, std::move(record));
            } catch (const std::exception& e) {
                throw StoreError(path.string() + ":" + std::to_string(number) + ": " + e.what());
            }
        });
    }
    std::vector<methods::RunRecord> out;
    out.reserve(records.size());
    for (auto& [key, record] : records) out.push_back(std::move(record));
    return out;
}

}  // namespace surveysim::harness
