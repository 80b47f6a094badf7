#include "phdmd/phdmd.h"

#include <cstring>
#include <filesystem>
#include <fstream>
#include <new>
#include <string>

#include "phdmd/config.hpp"
#include "phdmd/error.hpp"
#include "phdmd/model_io.hpp"
#include "phdmd/pipeline.hpp"
#include "phdmd/trajectory_io.hpp"

struct phdmd_config {
  phdmd::ExperimentConfig cfg;
};

struct phdmd_system {
  phdmd::PHSystem sys;
};

struct phdmd_trajectory {
  phdmd::Trajectory traj;
};

struct phdmd_result {
  phdmd::Identification id;
};

namespace {

thread_local std::string g_last_error;

phdmd_status set_error(phdmd_status status, const char* what) {
  g_last_error = what;
  return status;
}

phdmd_status status_of(phdmd::ErrorKind kind) {
  switch (kind) {
    case phdmd::ErrorKind::InvalidArgument: return PHDMD_ERR_INVALID_ARGUMENT;
    case phdmd::ErrorKind::Config: return PHDMD_ERR_CONFIG;
    case phdmd::ErrorKind::Io: return PHDMD_ERR_IO;
    case phdmd::ErrorKind::Structure: return PHDMD_ERR_STRUCTURE;
    case phdmd::ErrorKind::Numerical: return PHDMD_ERR_NUMERICAL;
  }
  return PHDMD_ERR_INTERNAL;
}

template <class F>
phdmd_status guarded(F&& f) {
  try {
    f();
    return PHDMD_OK;
  } catch (const phdmd::Error& e) {
    return set_error(status_of(e.kind()), e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    return set_error(PHDMD_ERR_IO, e.what());
  } catch (const std::bad_alloc&) {
    return set_error(PHDMD_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(PHDMD_ERR_INTERNAL, e.what());
  } catch (...) {
    return set_error(PHDMD_ERR_INTERNAL, "unknown exception");
  }
}

void need(const void* p, const char* what) {
  if (!p) phdmd::fail(phdmd::ErrorKind::InvalidArgument, std::string(what) + " is NULL");
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void maybe_return(const std::string& s, char** out) {
  if (out) *out = dup_string(s);
}

void copy_out(const phdmd::Matrix& m, double* buf, size_t len) {
  if (static_cast<size_t>(m.size()) != len) {
    phdmd::fail(phdmd::ErrorKind::InvalidArgument,
                "buffer holds " + std::to_string(len) + " values, " + std::to_string(m.size()) +
                    " needed");
  }
  if (len) need(buf, "buf");
  std::memcpy(buf, m.data(), len * sizeof(double));
}

}  // namespace

extern "C" {

const char* phdmd_version(void) { return PHDMD_VERSION_STRING; }

const char* phdmd_status_string(phdmd_status status) {
  switch (status) {
    case PHDMD_OK: return "ok";
    case PHDMD_ERR_INVALID_ARGUMENT: return "invalid argument";
    case PHDMD_ERR_CONFIG: return "configuration error";
    case PHDMD_ERR_IO: return "I/O error";
    case PHDMD_ERR_STRUCTURE: return "structure violation";
    case PHDMD_ERR_NUMERICAL: return "numerical failure";
    case PHDMD_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* phdmd_last_error(void) { return g_last_error.c_str(); }

void phdmd_string_free(char* s) { std::free(s); }

phdmd_status phdmd_config_preset(const char* name, phdmd_config** out) {
  return guarded([&] {
    need(name, "name");
    need(out, "out");
    *out = new phdmd_config{phdmd::preset(name)};
  });
}

phdmd_status phdmd_config_parse(const char* json_text, phdmd_config** out) {
  return guarded([&] {
    need(json_text, "json_text");
    need(out, "out");
    *out = new phdmd_config{phdmd::parse_config(json_text)};
  });
}

phdmd_status phdmd_config_load(const char* path, phdmd_config** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new phdmd_config{phdmd::load_config(path)};
  });
}

phdmd_status phdmd_config_set_seed(phdmd_config* cfg, uint64_t seed) {
  return guarded([&] {
    need(cfg, "cfg");
    cfg->cfg.seed = seed;
  });
}

phdmd_status phdmd_config_to_json(const phdmd_config* cfg, char** out) {
  return guarded([&] {
    need(cfg, "cfg");
    need(out, "out");
    *out = dup_string(phdmd::to_json(cfg->cfg));
  });
}

void phdmd_config_free(phdmd_config* cfg) { delete cfg; }

phdmd_status phdmd_system_msd(int n_masses, double mass, double stiffness, double damping,
                              int n_ports, phdmd_system** out) {
  return guarded([&] {
    need(out, "out");
    *out = new phdmd_system{phdmd::msd_builder(n_masses, mass, stiffness, damping, n_ports)};
  });
}

phdmd_status phdmd_system_load(const char* path, phdmd_system** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new phdmd_system{phdmd::load_system(path)};
  });
}

phdmd_status phdmd_system_save(const phdmd_system* sys, const char* dir) {
  return guarded([&] {
    need(sys, "sys");
    need(dir, "dir");
    phdmd::save_system(sys->sys, dir);
  });
}

phdmd_status phdmd_system_dims(const phdmd_system* sys, size_t* state_dim, size_t* port_dim) {
  return guarded([&] {
    need(sys, "sys");
    if (state_dim) *state_dim = static_cast<size_t>(sys->sys.state_dim());
    if (port_dim) *port_dim = static_cast<size_t>(sys->sys.port_dim());
  });
}

phdmd_status phdmd_system_block(const phdmd_system* sys, char block, double* buf, size_t len) {
  return guarded([&] {
    need(sys, "sys");
    const phdmd::PHSystem& s = sys->sys;
    const phdmd::Matrix* m = nullptr;
    switch (block) {
      case 'H': m = &s.H; break;
      case 'J': m = &s.J; break;
      case 'R': m = &s.R; break;
      case 'G': m = &s.G; break;
      case 'P': m = &s.P; break;
      case 'S': m = &s.S; break;
      case 'N': m = &s.N; break;
      default:
        phdmd::fail(phdmd::ErrorKind::InvalidArgument,
                    std::string("unknown block '") + block + "' (expected one of HJRGPSN)");
    }
    copy_out(*m, buf, len);
  });
}

phdmd_status phdmd_system_validate(const phdmd_system* sys, double tol, size_t* violations) {
  return guarded([&] {
    need(sys, "sys");
    need(violations, "violations");
    *violations = phdmd::validate(sys->sys, tol).size();
  });
}

phdmd_status phdmd_system_max_real_eigenvalue(const phdmd_system* sys, double* out) {
  return guarded([&] {
    need(sys, "sys");
    need(out, "out");
    *out = phdmd::max_real_eigenvalue(phdmd::to_lti(sys->sys).A);
  });
}

void phdmd_system_free(phdmd_system* sys) { delete sys; }

phdmd_status phdmd_trajectory_read(const char* csv_path, phdmd_trajectory** out) {
  return guarded([&] {
    need(csv_path, "csv_path");
    need(out, "out");
    *out = new phdmd_trajectory{phdmd::read_trajectory_csv(csv_path)};
  });
}

phdmd_status phdmd_trajectory_write(const phdmd_trajectory* traj, const char* csv_path) {
  return guarded([&] {
    need(traj, "traj");
    need(csv_path, "csv_path");
    phdmd::write_trajectory_csv(csv_path, traj->traj);
  });
}

phdmd_status phdmd_simulate_training(const phdmd_config* cfg, const phdmd_system* sys,
                                     phdmd_trajectory** out) {
  return guarded([&] {
    need(cfg, "cfg");
    need(sys, "sys");
    need(out, "out");
    *out = new phdmd_trajectory{phdmd::training_trajectory(cfg->cfg, sys->sys)};
  });
}

phdmd_status phdmd_simulate_test(const phdmd_config* cfg, const phdmd_system* sys,
                                 phdmd_trajectory** out) {
  return guarded([&] {
    need(cfg, "cfg");
    need(sys, "sys");
    need(out, "out");
    *out = new phdmd_trajectory{phdmd::test_trajectory(cfg->cfg, sys->sys)};
  });
}

phdmd_status phdmd_trajectory_dims(const phdmd_trajectory* traj, size_t* samples, size_t* inputs,
                                   size_t* states, size_t* outputs) {
  return guarded([&] {
    need(traj, "traj");
    const auto& t = traj->traj;
    if (samples) *samples = static_cast<size_t>(t.samples());
    if (inputs) *inputs = static_cast<size_t>(t.U.rows());
    if (states) *states = static_cast<size_t>(t.X.rows());
    if (outputs) *outputs = static_cast<size_t>(t.Y.rows());
  });
}

phdmd_status phdmd_trajectory_series(const phdmd_trajectory* traj, char which, double* buf,
                                     size_t len) {
  return guarded([&] {
    need(traj, "traj");
    const auto& t = traj->traj;
    switch (which) {
      case 't': copy_out(t.t, buf, len); break;
      case 'U': copy_out(t.U, buf, len); break;
      case 'X': copy_out(t.X, buf, len); break;
      case 'Y': copy_out(t.Y, buf, len); break;
      default:
        phdmd::fail(phdmd::ErrorKind::InvalidArgument,
                    std::string("unknown series '") + which + "' (expected t, U, X or Y)");
    }
  });
}

void phdmd_trajectory_free(phdmd_trajectory* traj) { delete traj; }

phdmd_status phdmd_identify(const phdmd_config* cfg, const phdmd_trajectory* train,
                            const phdmd_system* truth, const char* method, int reduced_order,
                            phdmd_result** out) {
  return guarded([&] {
    need(cfg, "cfg");
    need(train, "train");
    need(truth, "truth");
    need(method, "method");
    need(out, "out");
    std::optional<int> r;
    if (reduced_order > 0) r = reduced_order;
    *out = new phdmd_result{phdmd::identify(method, train->traj, truth->sys.H, r, cfg->cfg)};
  });
}

phdmd_status phdmd_result_report(const phdmd_result* res, char** out) {
  return guarded([&] {
    need(res, "res");
    need(out, "out");
    *out = dup_string(res->id.report_json);
  });
}

phdmd_status phdmd_result_system(const phdmd_result* res, phdmd_system** out) {
  return guarded([&] {
    need(res, "res");
    need(out, "out");
    const auto* ph = std::get_if<phdmd::PHSystem>(&res->id.model);
    if (!ph) {
      phdmd::fail(phdmd::ErrorKind::InvalidArgument,
                  "result of method " + res->id.method + " is not a port-Hamiltonian system");
    }
    *out = new phdmd_system{*ph};
  });
}

phdmd_status phdmd_result_save(const phdmd_result* res, const char* dir) {
  return guarded([&] {
    need(res, "res");
    need(dir, "dir");
    const auto& id = res->id;
    if (const auto* ph = std::get_if<phdmd::PHSystem>(&id.model)) {
      phdmd::save_system(*ph, dir, id.basis);
    } else {
      phdmd::save_lti(std::get<phdmd::LTISystem>(id.model), dir, id.basis);
    }
    std::ofstream report(std::filesystem::path(dir) / "report.json");
    report << id.report_json << '\n';
    if (!report) phdmd::fail(phdmd::ErrorKind::Io, std::string("cannot write report in ") + dir);
  });
}

void phdmd_result_free(phdmd_result* res) { delete res; }

phdmd_status phdmd_cmd_generate(const phdmd_config* cfg, const char* out_dir, char** summary) {
  return guarded([&] {
    need(cfg, "cfg");
    need(out_dir, "out_dir");
    maybe_return(phdmd::cmd_generate(cfg->cfg, out_dir), summary);
  });
}

phdmd_status phdmd_cmd_identify(const phdmd_config* cfg, const char* out_dir, const char* method,
                                char** summary) {
  return guarded([&] {
    need(cfg, "cfg");
    need(out_dir, "out_dir");
    need(method, "method");
    maybe_return(phdmd::cmd_identify(cfg->cfg, out_dir, method), summary);
  });
}

phdmd_status phdmd_cmd_evaluate(const phdmd_config* cfg, const char* out_dir, const char* method,
                                const char* reference_path, const char* model_path,
                                char** summary) {
  return guarded([&] {
    need(cfg, "cfg");
    need(out_dir, "out_dir");
    need(method, "method");
    std::optional<std::filesystem::path> ref, model;
    if (reference_path) ref = reference_path;
    if (model_path) model = model_path;
    maybe_return(phdmd::cmd_evaluate(cfg->cfg, out_dir, method, ref, model), summary);
  });
}

phdmd_status phdmd_cmd_experiment(const phdmd_config* cfg, const char* out_dir, char** summary) {
  return guarded([&] {
    need(cfg, "cfg");
    need(out_dir, "out_dir");
    maybe_return(phdmd::cmd_experiment(cfg->cfg, out_dir), summary);
  });
}

}  // extern "C"
