// Copyright 2026 The fwcomp authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// fwcomp: compiles platform-independent firewall policies (.fwb) into
// iptables, pf and ipfilter scripts, with validation, shadowing
// analysis, optimization and packet simulation.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "fwcomp/analysis.hpp"
#include "fwcomp/backends.hpp"
#include "fwcomp/fwbxml.hpp"
#include "fwcomp/semantics.hpp"
#include "fwcomp/transform.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitUnsupported = 2;
constexpr int kExitIo = 3;

struct Loaded {
  fwcomp::ObjectDatabase db;
  std::vector<fwcomp::Diagnostic> warnings;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw fwcomp::IoError("cannot open " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

Loaded load(const std::string& path) {
  Loaded loaded;
  loaded.db = fwcomp::parse(read_file(path), &loaded.warnings);
  fwcomp::resolve_address_tables(
      loaded.db, std::filesystem::path(path).parent_path().string());
  return loaded;
}

void print_diagnostics(const std::vector<fwcomp::Diagnostic>& diagnostics) {
  for (const auto& d : diagnostics) std::cerr << d.render() << "\n";
}

// Validation gate shared by compile/analyze/simulate: errors stop the
// run before any output is produced.
int validate_or_fail(const Loaded& loaded) {
  auto diagnostics = fwcomp::validate_schema(loaded.db);
  print_diagnostics(loaded.warnings);
  print_diagnostics(diagnostics);
  return fwcomp::has_errors(diagnostics) ? kExitValidation : kExitOk;
}

std::vector<std::shared_ptr<const fwcomp::FirewallObj>> select_firewalls(
    const fwcomp::ObjectDatabase& db, const std::string& name) {
  auto all = db.firewalls();
  if (name.empty()) return all;
  std::erase_if(all, [&](const auto& fw) { return fw->name != name; });
  return all;
}

int write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    std::cerr << "error: cannot write " << path << "\n";
    return kExitIo;
  }
  out << text;
  return out ? kExitOk : kExitIo;
}

std::optional<fwcomp::Universe> parse_universe_spec(
    const std::string& spec, const fwcomp::FirewallObj& fw) {
  fwcomp::Universe universe;
  for (const auto& iface : fw.interfaces) {
    universe.ifaces.push_back(iface->name);
  }
  universe.dports = {80};
  std::istringstream in(spec);
  std::string token;
  auto parse_ports = [](const std::string& text) {
    std::vector<uint16_t> out;
    std::istringstream items(text);
    std::string item;
    while (std::getline(items, item, ',')) {
      out.push_back(uint16_t(std::stoul(item)));
    }
    return out;
  };
  while (in >> token) {
    auto eq = token.find('=');
    if (eq == std::string::npos) return std::nullopt;
    std::string key = token.substr(0, eq);
    std::string value = token.substr(eq + 1);
    uint32_t stride = 1;
    if (auto at = value.find('@'); at != std::string::npos) {
      stride = uint32_t(std::stoul(value.substr(at + 1)));
      value = value.substr(0, at);
    }
    if (key == "src" || key == "dst") {
      auto cidr = fwcomp::parse_cidr(value);
      if (!cidr) return std::nullopt;
      auto addrs = fwcomp::Universe::window(*cidr, stride);
      (key == "src" ? universe.srcs : universe.dsts) = addrs;
    } else if (key == "sports") {
      universe.sports = parse_ports(value);
    } else if (key == "dports") {
      universe.dports = parse_ports(value);
    } else if (key == "protos") {
      universe.protos.clear();
      std::istringstream items(value);
      std::string item;
      while (std::getline(items, item, ',')) {
        if (item == "tcp") universe.protos.push_back(fwcomp::Proto::Tcp);
        if (item == "udp") universe.protos.push_back(fwcomp::Proto::Udp);
        if (item == "icmp") universe.protos.push_back(fwcomp::Proto::Icmp);
      }
    } else if (key == "ifaces") {
      universe.ifaces.clear();
      std::istringstream items(value);
      std::string item;
      while (std::getline(items, item, ',')) {
        universe.ifaces.push_back(item);
      }
    } else {
      return std::nullopt;
    }
  }
  if (universe.srcs.empty() || universe.dsts.empty()) return std::nullopt;
  return universe;
}

int run_validate(const std::string& input) {
  Loaded loaded = load(input);
  return validate_or_fail(loaded);
}

int run_compile(const std::string& input, const std::string& fw_name,
                const std::string& target_name, const std::string& output) {
  Loaded loaded = load(input);
  if (int rc = validate_or_fail(loaded); rc != kExitOk) return rc;

  auto firewalls = select_firewalls(loaded.db, fw_name);
  if (firewalls.empty()) {
    std::cerr << "error: no firewall "
              << (fw_name.empty() ? "defined" : "named '" + fw_name + "'")
              << " in " << input << "\n";
    return kExitValidation;
  }
  if (!output.empty() && firewalls.size() > 1) {
    std::cerr << "error: -o needs a single firewall; use --fw\n";
    return kExitValidation;
  }

  for (const auto& fw : firewalls) {
    fwcomp::Platform target = fw->platform;
    if (!target_name.empty()) {
      target = *fwcomp::parse_platform(target_name);
    }
    auto result = fwcomp::run_pipeline(*fw, target, loaded.db);
    print_diagnostics(result.warnings);
    fwcomp::Script script =
        fwcomp::emit(target, result.filter, result.nat);
    std::string path = output.empty()
                           ? fw->name + "." +
                                 fwcomp::platform_name(target) + ".fw"
                           : output;
    if (int rc = write_text_file(path, script.text()); rc != kExitOk) {
      return rc;
    }
    std::cout << "wrote " << path << "\n";
  }
  return kExitOk;
}

int run_analyze(const std::string& input, const std::string& fw_name,
                bool do_optimize, const std::string& output,
                const std::string& universe_spec) {
  Loaded loaded = load(input);
  if (int rc = validate_or_fail(loaded); rc != kExitOk) return rc;

  auto firewalls = select_firewalls(loaded.db, fw_name);
  if (firewalls.empty()) {
    std::cerr << "error: no matching firewall in " << input << "\n";
    return kExitValidation;
  }

  for (const auto& fw : firewalls) {
    std::vector<std::string> skipped;
    auto reports = fwcomp::detect_shadowing(fw->policy, loaded.db, &skipped);
    for (const std::string& note : skipped) {
      std::cerr << "warning: " << fw->name << ": " << note << "\n";
    }
    for (const auto& report : reports) {
      std::cout << report.render() << "\n";
    }
  }

  if (!do_optimize) return kExitOk;
  if (firewalls.size() != 1) {
    std::cerr << "error: --optimize needs a single firewall; use --fw\n";
    return kExitValidation;
  }
  if (output.empty()) {
    std::cerr << "error: --optimize requires -o OUT.fwb\n";
    return kExitValidation;
  }

  const auto& fw = firewalls[0];
  fwcomp::Policy optimized = fwcomp::optimize(fw->policy, loaded.db);

  if (!universe_spec.empty()) {
    auto universe = parse_universe_spec(universe_spec, *fw);
    if (!universe) {
      std::cerr << "error: bad --universe spec\n";
      return kExitValidation;
    }
    if (!fwcomp::equivalent(*fw, fw->policy, optimized, *universe,
                            loaded.db)) {
      std::cerr << "error: optimization changed verdicts over the "
                   "requested universe\n";
      return kExitValidation;
    }
    std::cout << "optimization verified over " << universe->size()
              << " packets\n";
  }

  // Rebuild the database with the optimized policy swapped in.
  auto replacement = std::make_shared<fwcomp::FirewallObj>(*fw);
  replacement->policy = optimized;
  fwcomp::ObjectDatabase rewritten;
  rewritten.ensure_standard_library();
  for (const fwcomp::Library& lib : loaded.db.libraries()) {
    if (lib.builtin) continue;
    fwcomp::Library copy = lib;
    for (auto& obj : copy.objects) {
      if (obj->id == fw->id) obj = replacement;
    }
    rewritten.add_library(std::move(copy));
  }
  if (int rc = write_text_file(output, fwcomp::serialize(rewritten));
      rc != kExitOk) {
    return rc;
  }
  std::cout << "wrote " << output << "\n";
  return kExitOk;
}

int run_simulate(const std::string& input, const std::string& fw_name,
                 const std::string& packet_literal) {
  Loaded loaded = load(input);
  if (int rc = validate_or_fail(loaded); rc != kExitOk) return rc;

  auto firewalls = select_firewalls(loaded.db, fw_name);
  if (firewalls.size() != 1) {
    std::cerr << "error: simulate needs exactly one firewall; use --fw\n";
    return kExitValidation;
  }
  fwcomp::Packet packet = fwcomp::parse_packet_literal(packet_literal);
  fwcomp::Verdict verdict =
      fwcomp::evaluate(*firewalls[0], packet, loaded.db);

  std::cout << fwcomp::verdict_action_name(verdict.action);
  if (verdict.matched_rule) {
    std::cout << " (rule " << *verdict.matched_rule << ")";
  }
  std::cout << "\n";
  if (!verdict.counters_hit.empty()) {
    std::cout << "counters:";
    for (int position : verdict.counters_hit) std::cout << " " << position;
    std::cout << "\n";
  }
  if (!(verdict.egress == packet)) {
    std::cout << "egress: src=" << fwcomp::format_ipv4(verdict.egress.src_ip)
              << " dst=" << fwcomp::format_ipv4(verdict.egress.dst_ip);
    if (verdict.egress.proto == fwcomp::Proto::Tcp ||
        verdict.egress.proto == fwcomp::Proto::Udp) {
      std::cout << " sport=" << verdict.egress.src_port
                << " dport=" << verdict.egress.dst_port;
    }
    std::cout << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fwcomp - abstract firewall policy compiler"};
  app.require_subcommand(1);

  std::string input, fw_name, target_name, output, packet_literal,
      universe_spec;
  bool do_optimize = false;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("input", input, ".fwb policy file")->required();
    cmd->add_option("--fw", fw_name, "firewall name");
  };

  CLI::App* validate = app.add_subcommand("validate", "check a policy file");
  add_common(validate);

  CLI::App* compile =
      app.add_subcommand("compile", "compile to a target script");
  add_common(compile);
  compile->add_option("--target", target_name, "override the platform")
      ->check(CLI::IsMember({"iptables", "pf", "ipfilter"}));
  compile->add_option("-o", output, "output file");

  CLI::App* analyze =
      app.add_subcommand("analyze", "report rule shadowing");
  add_common(analyze);
  analyze->add_flag("--optimize", do_optimize, "write an optimized policy");
  analyze->add_option("-o", output, "output .fwb for --optimize");
  analyze->add_option("--universe", universe_spec,
                      "verification universe (testing)");

  CLI::App* simulate =
      app.add_subcommand("simulate", "evaluate one packet");
  add_common(simulate);
  simulate->add_option("--packet", packet_literal, "packet literal")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(validate)) return run_validate(input);
    if (app.got_subcommand(compile)) {
      return run_compile(input, fw_name, target_name, output);
    }
    if (app.got_subcommand(analyze)) {
      return run_analyze(input, fw_name, do_optimize, output, universe_spec);
    }
    if (app.got_subcommand(simulate)) {
      return run_simulate(input, fw_name, packet_literal);
    }
  } catch (const fwcomp::UnsupportedFeatureError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUnsupported;
  } catch (const fwcomp::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const fwcomp::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitOk;
}
