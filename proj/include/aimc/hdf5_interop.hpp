#pragma once

// HDF5 export/import of a canonical corpus.
//
// One HDF5 file holds the whole corpus: a group per (snr, class) named after
// the canonical path ("snr_10/LFM_up"), each with attributes class_id, snr_db
// and sample_rate_hz, and one dataset per record field. Dataset names are
// configurable so the layout can be matched to other tooling. The root group
// carries the manifest JSON (minus entries) as a string attribute.

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <hdf5.h>

#include "aimc/container.hpp"
#include "aimc/dataset.hpp"
#include "aimc/errors.hpp"

namespace aimc::hdf5 {

struct DatasetNames {
    std::string iq = "iq";  // float32 [pulses, capture_len, 2]
    std::string seed = "seed";
    std::string carrier_hz = "carrier_hz";
    std::string pulse_width_s = "pulse_width_s";
    std::string toa_s = "toa_s";
    std::string measured_snr_db = "measured_snr_db";
    std::string class_params = "class_params";  // subgroup, one f64 dataset per key

    static DatasetNames from_json(const Json& j) {
        DatasetNames n;
        const std::map<std::string, std::string*> fields{
            {"iq", &n.iq}, {"seed", &n.seed}, {"carrier_hz", &n.carrier_hz}, {"pulse_width_s", &n.pulse_width_s},
            {"toa_s", &n.toa_s}, {"measured_snr_db", &n.measured_snr_db}, {"class_params", &n.class_params}};
        for (const auto& [key, value] : j.items()) {
            auto it = fields.find(key);
            if (it == fields.end()) throw ConfigError("hdf5_names." + key, "unknown dataset role");
            if (!value.is_string() || value.get<std::string>().empty())
                throw ConfigError("hdf5_names." + key, "must be a nonempty string");
            *it->second = value.get<std::string>();
        }
        return n;
    }
};

namespace detail {

/// Owning HDF5 identifier.
class Handle {
public:
    Handle() = default;
    Handle(hid_t id, herr_t (*close)(hid_t), const std::string& what) : id_(id), close_(close) {
        if (id < 0) throw ContainerError(ContainerError::Kind::io, "HDF5: " + what);
    }
    Handle(const Handle&) = delete;
    Handle& operator=(const Handle&) = delete;
    Handle(Handle&& o) noexcept : id_(o.id_), close_(o.close_) { o.id_ = -1; }
    Handle& operator=(Handle&& o) noexcept {
        std::swap(id_, o.id_);
        std::swap(close_, o.close_);
        return *this;
    }
    ~Handle() {
        if (id_ >= 0 && close_) close_(id_);
    }
    hid_t get() const noexcept { return id_; }
    operator hid_t() const noexcept { return id_; }

private:
    hid_t id_ = -1;
    herr_t (*close_)(hid_t) = nullptr;
};

inline void check(herr_t status, const std::string& what) {
    if (status < 0) throw ContainerError(ContainerError::Kind::io, "HDF5: " + what);
}

inline void write_string_attr(hid_t obj, const std::string& name, const std::string& value) {
    Handle type(H5Tcopy(H5T_C_S1), H5Tclose, "string type");
    check(H5Tset_size(type, value.empty() ? 1 : value.size()), "string size");
    Handle space(H5Screate(H5S_SCALAR), H5Sclose, "scalar space");
    Handle attr(H5Acreate2(obj, name.c_str(), type, space, H5P_DEFAULT, H5P_DEFAULT), H5Aclose, "create attribute " + name);
    check(H5Awrite(attr, type, value.c_str()), "write attribute " + name);
}

inline std::string read_string_attr(hid_t obj, const std::string& name) {
    Handle attr(H5Aopen(obj, name.c_str(), H5P_DEFAULT), H5Aclose, "missing attribute " + name);
    Handle type(H5Aget_type(attr), H5Tclose, "attribute type");
    std::string value(H5Tget_size(type), '\0');
    Handle mem(H5Tcopy(H5T_C_S1), H5Tclose, "string type");
    check(H5Tset_size(mem, value.size()), "string size");
    check(H5Aread(attr, mem, value.data()), "read attribute " + name);
    while (!value.empty() && value.back() == '\0') value.pop_back();
    return value;
}

template <typename T>
void write_scalar_attr(hid_t obj, const std::string& name, hid_t type, T value) {
    Handle space(H5Screate(H5S_SCALAR), H5Sclose, "scalar space");
    Handle attr(H5Acreate2(obj, name.c_str(), type, space, H5P_DEFAULT, H5P_DEFAULT), H5Aclose, "create attribute " + name);
    check(H5Awrite(attr, type, &value), "write attribute " + name);
}

template <typename T>
T read_scalar_attr(hid_t obj, const std::string& name, hid_t type) {
    Handle attr(H5Aopen(obj, name.c_str(), H5P_DEFAULT), H5Aclose, "missing attribute " + name);
    T value{};
    check(H5Aread(attr, type, &value), "read attribute " + name);
    return value;
}

template <typename T>
void write_vector(hid_t group, const std::string& name, hid_t type, const std::vector<T>& v) {
    const hsize_t dims[1] = {v.size()};
    Handle space(H5Screate_simple(1, dims, nullptr), H5Sclose, "dataspace");
    Handle ds(H5Dcreate2(group, name.c_str(), type, space, H5P_DEFAULT, H5P_DEFAULT, H5P_DEFAULT), H5Dclose,
              "create dataset " + name);
    check(H5Dwrite(ds, type, H5S_ALL, H5S_ALL, H5P_DEFAULT, v.data()), "write dataset " + name);
}

template <typename T>
std::vector<T> read_vector(hid_t group, const std::string& name, hid_t type, std::size_t expected) {
    Handle ds(H5Dopen2(group, name.c_str(), H5P_DEFAULT), H5Dclose, "missing dataset " + name);
    Handle space(H5Dget_space(ds), H5Sclose, "dataspace");
    if (static_cast<std::size_t>(H5Sget_simple_extent_npoints(space)) != expected)
        throw ContainerError(ContainerError::Kind::format, "HDF5 dataset " + name + " has the wrong length");
    std::vector<T> v(expected);
    check(H5Dread(ds, type, H5S_ALL, H5S_ALL, H5P_DEFAULT, v.data()), "read dataset " + name);
    return v;
}

inline Handle create_group_path(hid_t file, const std::string& path) {
    Handle lcpl(H5Pcreate(H5P_LINK_CREATE), H5Pclose, "link property list");
    check(H5Pset_create_intermediate_group(lcpl, 1), "intermediate groups");
    return Handle(H5Gcreate2(file, path.c_str(), lcpl, H5P_DEFAULT, H5P_DEFAULT), H5Gclose, "create group " + path);
}

inline std::string group_path(const dataset::ManifestEntry& e) {
    return dataset::snr_dir_name(e.snr_db) + "/" + e.class_id;
}

}  // namespace detail

/// Writes the corpus under `root` (described by `manifest`) to one HDF5 file.
inline void export_corpus(const dataset::DatasetManifest& manifest, const std::filesystem::path& root,
                          const std::filesystem::path& h5_path, const DatasetNames& names = {}) {
    using namespace detail;
    Handle file(H5Fcreate(h5_path.c_str(), H5F_ACC_TRUNC, H5P_DEFAULT, H5P_DEFAULT), H5Fclose,
                "cannot create " + h5_path.string());
    Json head = manifest.to_json();
    head.erase("entries");
    write_string_attr(file, "aimc_manifest", head.dump());

    for (const auto& e : manifest.entries) {
        container::ClassFileHeader header;
        const auto records = container::read_class_file(root / e.path, &header);
        Handle group = create_group_path(file, group_path(e));
        write_string_attr(group, "class_id", e.class_id);
        write_scalar_attr(group, "snr_db", H5T_NATIVE_DOUBLE, e.snr_db);
        write_scalar_attr(group, "sample_rate_hz", H5T_NATIVE_DOUBLE, header.sample_rate_hz);
        write_scalar_attr(group, "snr_db_f32", H5T_NATIVE_FLOAT, header.snr_db);
        write_scalar_attr(group, "flags", H5T_NATIVE_UINT16, header.flags);

        std::vector<std::uint64_t> seeds;
        std::vector<double> carrier, pw, toa;
        std::vector<float> measured;
        std::map<std::string, std::vector<double>> extra;
        for (const auto& r : records) {
            seeds.push_back(r.params.seed);
            carrier.push_back(r.params.carrier_hz);
            pw.push_back(r.params.pulse_width_s);
            toa.push_back(r.params.toa_s);
            measured.push_back(r.measured_snr_db);
            for (const auto& [k, v] : r.params.class_params) extra[k].push_back(v);
        }
        write_vector(group, names.seed, H5T_NATIVE_UINT64, seeds);
        write_vector(group, names.carrier_hz, H5T_NATIVE_DOUBLE, carrier);
        write_vector(group, names.pulse_width_s, H5T_NATIVE_DOUBLE, pw);
        write_vector(group, names.toa_s, H5T_NATIVE_DOUBLE, toa);
        write_vector(group, names.measured_snr_db, H5T_NATIVE_FLOAT, measured);
        Handle params(H5Gcreate2(group, names.class_params.c_str(), H5P_DEFAULT, H5P_DEFAULT, H5P_DEFAULT), H5Gclose,
                      "create group " + names.class_params);
        for (const auto& [k, v] : extra) {
            if (v.size() != records.size())
                throw ContainerError(ContainerError::Kind::invalid, "parameter " + k + " missing from some records");
            write_vector(params, k, H5T_NATIVE_DOUBLE, v);
        }

        const hsize_t dims[3] = {records.size(), header.capture_len, 2};
        Handle space(H5Screate_simple(3, dims, nullptr), H5Sclose, "iq dataspace");
        Handle ds(H5Dcreate2(group, names.iq.c_str(), H5T_IEEE_F32LE, space, H5P_DEFAULT, H5P_DEFAULT, H5P_DEFAULT),
                  H5Dclose, "create dataset " + names.iq);
        std::vector<float> iq;
        iq.reserve(records.size() * header.capture_len * 2);
        for (const auto& r : records)
            for (const auto& s : r.iq) {
                iq.push_back(s.real());
                iq.push_back(s.imag());
            }
        check(H5Dwrite(ds, H5T_NATIVE_FLOAT, H5S_ALL, H5S_ALL, H5P_DEFAULT, iq.data()), "write dataset " + names.iq);
    }
}

/// Rebuilds canonical class files and a manifest under `root` from an HDF5
/// file written by export_corpus (or one with matching names).
inline dataset::DatasetManifest import_corpus(const std::filesystem::path& h5_path, const std::filesystem::path& root,
                                              const DatasetNames& names = {}) {
    using namespace detail;
    Handle file(H5Fopen(h5_path.c_str(), H5F_ACC_RDONLY, H5P_DEFAULT), H5Fclose, "cannot open " + h5_path.string());
    Json head;
    try {
        head = Json::parse(read_string_attr(file, "aimc_manifest"));
    } catch (const Json::exception& ex) {
        throw ContainerError(ContainerError::Kind::format, std::string("bad manifest attribute: ") + ex.what());
    }
    head["entries"] = Json::array();
    auto manifest = dataset::DatasetManifest::from_json(head);
    const auto& cfg = manifest.config;
    const auto classes = default_registry().select(cfg.classes);

    for (double snr : cfg.snr_levels_db) {
        std::filesystem::create_directories(root / dataset::snr_dir_name(snr));
        for (auto ci : classes) {
            dataset::ManifestEntry e;
            e.snr_db = snr;
            e.class_id = default_registry()[ci].id;
            e.path = group_path(e) + ".aimcspec";
            if (H5Lexists(file, dataset::snr_dir_name(snr).c_str(), H5P_DEFAULT) <= 0 ||
                H5Lexists(file, group_path(e).c_str(), H5P_DEFAULT) <= 0)
                throw ContainerError(ContainerError::Kind::format, "HDF5 file lacks group " + group_path(e));
            Handle group(H5Gopen2(file, group_path(e).c_str(), H5P_DEFAULT), H5Gclose, "open group " + group_path(e));

            Handle ds(H5Dopen2(group, names.iq.c_str(), H5P_DEFAULT), H5Dclose, "missing dataset " + names.iq);
            Handle space(H5Dget_space(ds), H5Sclose, "iq dataspace");
            hsize_t dims[3] = {};
            if (H5Sget_simple_extent_ndims(space) != 3 || H5Sget_simple_extent_dims(space, dims, nullptr) != 3 || dims[2] != 2)
                throw ContainerError(ContainerError::Kind::format, "dataset " + names.iq + " must be [pulses, samples, 2]");
            const auto n = static_cast<std::size_t>(dims[0]);
            const auto len = static_cast<std::size_t>(dims[1]);
            std::vector<float> iq(n * len * 2);
            check(H5Dread(ds, H5T_NATIVE_FLOAT, H5S_ALL, H5S_ALL, H5P_DEFAULT, iq.data()), "read dataset " + names.iq);

            const auto seeds = read_vector<std::uint64_t>(group, names.seed, H5T_NATIVE_UINT64, n);
            const auto carrier = read_vector<double>(group, names.carrier_hz, H5T_NATIVE_DOUBLE, n);
            const auto pw = read_vector<double>(group, names.pulse_width_s, H5T_NATIVE_DOUBLE, n);
            const auto toa = read_vector<double>(group, names.toa_s, H5T_NATIVE_DOUBLE, n);
            const auto measured = read_vector<float>(group, names.measured_snr_db, H5T_NATIVE_FLOAT, n);
            std::map<std::string, std::vector<double>> extra;
            {
                Handle params(H5Gopen2(group, names.class_params.c_str(), H5P_DEFAULT), H5Gclose,
                              "missing group " + names.class_params);
                H5G_info_t info{};
                check(H5Gget_info(params, &info), "group info");
                for (hsize_t i = 0; i < info.nlinks; ++i) {
                    const auto size = H5Lget_name_by_idx(params, ".", H5_INDEX_NAME, H5_ITER_INC, i, nullptr, 0, H5P_DEFAULT);
                    std::string key(static_cast<std::size_t>(size), '\0');
                    H5Lget_name_by_idx(params, ".", H5_INDEX_NAME, H5_ITER_INC, i, key.data(), key.size() + 1, H5P_DEFAULT);
                    extra[key] = read_vector<double>(params, key, H5T_NATIVE_DOUBLE, n);
                }
            }

            container::ClassFileHeader header;
            header.pulse_count = static_cast<std::uint32_t>(n);
            header.capture_len = static_cast<std::uint32_t>(len);
            header.sample_rate_hz = read_scalar_attr<double>(group, "sample_rate_hz", H5T_NATIVE_DOUBLE);
            header.snr_db = read_scalar_attr<float>(group, "snr_db_f32", H5T_NATIVE_FLOAT);
            header.flags = read_scalar_attr<std::uint16_t>(group, "flags", H5T_NATIVE_UINT16);
            header.class_id = e.class_id;
            container::ClassFileWriter writer(root / e.path, header);
            for (std::size_t p = 0; p < n; ++p) {
                container::ClassRecord r;
                r.params.class_id = e.class_id;
                r.params.seed = seeds[p];
                r.params.carrier_hz = carrier[p];
                r.params.pulse_width_s = pw[p];
                r.params.toa_s = toa[p];
                for (const auto& [k, v] : extra) r.params.class_params[k] = v[p];
                r.measured_snr_db = measured[p];
                r.iq.resize(len);
                for (std::size_t m = 0; m < len; ++m) r.iq[m] = cfloat(iq[(p * len + m) * 2], iq[(p * len + m) * 2 + 1]);
                writer.append(r);
            }
            e.pulse_count = header.pulse_count;
            e.byte_len = writer.bytes_written();
            e.sha256 = writer.finish();
            manifest.entries.push_back(std::move(e));
        }
    }
    manifest.save(root / dataset::manifest_name);
    return manifest;
}

}  // namespace aimc::hdf5
