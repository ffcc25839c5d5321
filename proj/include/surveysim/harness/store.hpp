#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "surveysim/methods/run_method.hpp"

namespace surveysim::harness {

class StoreError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Append-only JSONL records, one shard per (dataset, model). Opening a store
// drops a torn trailing line left by a crash and indexes the keys present.
class RecordStore {
public:
    explicit RecordStore(std::filesystem::path directory);
    ~RecordStore();

    RecordStore(const RecordStore&) = delete;
    RecordStore& operator=(const RecordStore&) = delete;

    static std::string shard_name(const std::string& dataset_id, const std::string& model_id);

    bool contains(const std::string& key) const;
    std::size_t size() const;

    // Thread-safe; one writer per shard. The record is flushed before return.
    // A key already present is ignored. Throws StoreError on I/O failure.
    void append(const methods::RunRecord& record);

    // Every record on disk ordered by key; the first copy of a key wins.
    std::vector<methods::RunRecord> load_all() const;

    const std::filesystem::path& directory() const { return directory_; }

private:
    struct Shard {
        std::mutex mutex;
        std::ofstream out;
    };

    Shard& shard_for(const std::string& name);

    std::filesystem::path directory_;
    mutable std::mutex mutex_;
    std::set<std::string> keys_;
    std::map<std::string, std::unique_ptr<Shard>> shards_;
};

}  // namespace surveysim::harness
