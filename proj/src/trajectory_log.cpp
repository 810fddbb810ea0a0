// Copyright 2026 The ibvs_lander Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ibvs/trajectory_log.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "ibvs/errors.hpp"

namespace ibvs {

const char kLogHeader[] =
    "t,mode,xi_x,xi_y,xi_z,v_x,v_y,v_z,yaw,pitch,roll,"
    "omega_x,omega_y,omega_z,F_x,F_y,F_z,F_T,gamma_x,gamma_y,gamma_z,"
    "q_t_x,q_t_y,q_t_z,q_w_x,q_w_y,q_w_z,qbar_w_x,qbar_w_y,qbar_w_z,alpha_w,"
    "phi_t_x,phi_t_y,phi_t_z,phi_w_x,phi_w_y,phi_w_z,d_t,d_o,d_e,"
    "eta_w_x,eta_w_y,eta_w_z,L1,L2,L3";

namespace {

constexpr int kColumns = 46;

void flatten(const LogRecord& r, double* out) {
  int k = 0;
  out[k++] = r.t;
  out[k++] = static_cast<double>(r.mode);
  for (int i = 0; i < 3; ++i) out[k++] = r.xi[i];
  for (int i = 0; i < 3; ++i) out[k++] = r.v[i];
  out[k++] = r.yaw;
  out[k++] = r.pitch;
  out[k++] = r.roll;
  for (int i = 0; i < 3; ++i) out[k++] = r.omega[i];
  for (int i = 0; i < 3; ++i) out[k++] = r.F[i];
  out[k++] = r.F_T;
  for (int i = 0; i < 3; ++i) out[k++] = r.gamma[i];
  for (int i = 0; i < 3; ++i) out[k++] = r.q_t[i];
  for (int i = 0; i < 3; ++i) out[k++] = r.q_w[i];
  for (int i = 0; i < 3; ++i) out[k++] = r.qbar_w[i];
  out[k++] = r.alpha_w;
  for (int i = 0; i < 3; ++i) out[k++] = r.phi_t[i];
  for (int i = 0; i < 3; ++i) out[k++] = r.phi_w[i];
  out[k++] = r.d_t;
  out[k++] = r.d_o;
  out[k++] = r.d_e;
  for (int i = 0; i < 3; ++i) out[k++] = r.eta_w[i];
  out[k++] = r.L1;
  out[k++] = r.L2;
  out[k++] = r.L3;
}

LogRecord unflatten(const double* in) {
  LogRecord r;
  int k = 0;
  r.t = in[k++];
  r.mode = static_cast<int>(in[k++]);
  for (int i = 0; i < 3; ++i) r.xi[i] = in[k++];
  for (int i = 0; i < 3; ++i) r.v[i] = in[k++];
  r.yaw = in[k++];
  r.pitch = in[k++];
  r.roll = in[k++];
  for (int i = 0; i < 3; ++i) r.omega[i] = in[k++];
  for (int i = 0; i < 3; ++i) r.F[i] = in[k++];
  r.F_T = in[k++];
  for (int i = 0; i < 3; ++i) r.gamma[i] = in[k++];
  for (int i = 0; i < 3; ++i) r.q_t[i] = in[k++];
  for (int i = 0; i < 3; ++i) r.q_w[i] = in[k++];
  for (int i = 0; i < 3; ++i) r.qbar_w[i] = in[k++];
  r.alpha_w = in[k++];
  for (int i = 0; i < 3; ++i) r.phi_t[i] = in[k++];
  for (int i = 0; i < 3; ++i) r.phi_w[i] = in[k++];
  r.d_t = in[k++];
  r.d_o = in[k++];
  r.d_e = in[k++];
  for (int i = 0; i < 3; ++i) r.eta_w[i] = in[k++];
  r.L1 = in[k++];
  r.L2 = in[k++];
  r.L3 = in[k++];
  return r;
}

void append_event(std::string& line, const char* name,
                  const std::optional<double>& value, bool& first) {
  if (!value.has_value()) return;
  line += fmt::format("{}{}={:.9g}", first ? "" : ", ", name, *value);
  first = false;
}

}  // namespace

void write_log_csv(const TrajectoryLog& log, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(fmt::format("cannot write log file `{}`", path));
  out << kLogHeader << '\n';
  double buf[kColumns];
  std::string line;
  for (const LogRecord& r : log.records) {
    flatten(r, buf);
    line.clear();
    line += fmt::format("{:.9g}", buf[0]);
    line += fmt::format(",{}", r.mode);
    for (int i = 2; i < kColumns; ++i) line += fmt::format(",{:.9g}", buf[i]);
    out << line << '\n';
  }
  std::string events = "# events: ";
  bool first = true;
  append_event(events, "T1", log.events.t1, first);
  append_event(events, "T2", log.events.t2, first);
  append_event(events, "T3", log.events.t3, first);
  append_event(events, "T4", log.events.t4, first);
  append_event(events, "touchdown", log.events.touchdown, first);
  append_event(events, "abort", log.events.abort, first);
  if (first) events += "none";
  out << events << '\n';
  if (!log.events.abort_reason.empty()) {
    out << "# abort_reason: " << log.events.abort_reason << '\n';
  }
}

TrajectoryLog read_log_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(fmt::format("cannot open log file `{}`", path));
  TrajectoryLog log;
  std::string line;
  int line_no = 0;

  if (!std::getline(in, line)) throw ParseError("log file is empty");
  ++line_no;
  if (line != kLogHeader) {
    throw ParseError(
        fmt::format("log header mismatch at line 1: got `{}`", line));
  }

  double buf[kColumns];
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line[0] == '#') {
      // Event trailer: `# events: T1=0, T2=8.1, ...` or `# abort_reason: ...`
      if (line.rfind("# events:", 0) == 0) {
        std::istringstream ss(line.substr(9));
        std::string tok;
        while (std::getline(ss, tok, ',')) {
          const auto eq = tok.find('=');
          if (eq == std::string::npos) continue;
          std::string name = tok.substr(0, eq);
          name.erase(0, name.find_first_not_of(' '));
          name.erase(name.find_last_not_of(' ') + 1);
          const double value = std::strtod(tok.c_str() + eq + 1, nullptr);
          if (name == "T1") log.events.t1 = value;
          else if (name == "T2") log.events.t2 = value;
          else if (name == "T3") log.events.t3 = value;
          else if (name == "T4") log.events.t4 = value;
          else if (name == "touchdown") log.events.touchdown = value;
          else if (name == "abort") log.events.abort = value;
        }
      } else if (line.rfind("# abort_reason:", 0) == 0) {
        log.events.abort_reason = line.substr(16);
      }
      continue;
    }
    const char* p = line.c_str();
    char* end = nullptr;
    for (int i = 0; i < kColumns; ++i) {
      buf[i] = std::strtod(p, &end);
      if (end == p) {
        throw ParseError(fmt::format(
            "malformed number in field {} at line {}", i + 1, line_no));
      }
      p = end;
      if (i + 1 < kColumns) {
        if (*p != ',') {
          throw ParseError(fmt::format(
              "expected {} comma-separated fields at line {}", kColumns,
              line_no));
        }
        ++p;
      }
    }
    log.records.push_back(unflatten(buf));
  }
  if (log.records.size() >= 2) {
    log.dt = log.records[1].t - log.records[0].t;
  }
  return log;
}

}  // namespace ibvs
