"""Run reports: canonical JSON and a plain-text rendering."""

from __future__ import annotations

import hashlib
import json
import math

TOOL = "qcfix"


def input_digest(data: bytes) -> str:
    return "sha256:" + hashlib.sha256(data).hexdigest()


def _plain(obj):
    """Convert to JSON-safe builtins; non-finite floats become strings."""
    if isinstance(obj, float):
        if math.isnan(obj):
            return "nan"
        if math.isinf(obj):
            return "inf" if obj > 0 else "-inf"
        return obj
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    return obj


def canonical_json(obj) -> str:
    """Sorted keys, shortest round-trip float repr, trailing newline."""
    return json.dumps(_plain(obj), sort_keys=True, indent=2, ensure_ascii=False, allow_nan=False) + "\n"


def make_report(version: str, command: str, digest: str, payload: dict, exit_code: int) -> dict:
    return {
        "tool": TOOL,
        "version": version,
        "command": command,
        "input_digest": digest,
        "exit_code": exit_code,
        "payload": payload,
    }


def fmt_num(v) -> str:
    if isinstance(v, float):
        if math.isinf(v):
            return "inf"
        return repr(v)
    return str(v)


def _outcome_text(outcome: dict) -> str:
    kind = outcome["kind"]
    if kind == "fixed_point":
        return f"fixed point {outcome['label']} after {outcome['steps']} step(s)"
    if kind == "cycle":
        return "cycle " + " -> ".join(outcome["labels"])
    return "no convergence within max-iters"


def _cert_summary(certs) -> str:
    if isinstance(certs, dict):
        total, failed = certs["checked"], len(certs["failures"])
    else:
        total, failed = len(certs), sum(not c["holds"] for c in certs)
    return f"{total - failed}/{total} hold"


def _contraction_lines(reports: list[dict]) -> list[str]:
    lines = [f"  {'terms':<22} {'power':>5} {'minimal_q':>22}  witness   contractive"]
    for r in reports:
        wit = "-" if r["witness_labels"] is None else "(" + ",".join(r["witness_labels"]) + ")"
        lines.append(
            f"  {r['terms']:<22} {r.get('power', 1):>5} {fmt_num(r['minimal_q']):>22}  {wit:<9} {'yes' if r['contractive'] else 'no'}"
        )
    return lines


def render_text(report: dict) -> str:
    p = report["payload"]
    cmd = report["command"]
    lines = [f"{report['tool']} {report['version']} {cmd}  [{report['input_digest'][:19]}]"]
    if "error" in p:
        lines.append(f"error: {p['error']}")
    if cmd == "validate" and "valid" in p:
        if p["valid"]:
            lines.append(f"valid metric on {p['points']} point(s)")
        else:
            lines.append(f"invalid: {p['axiom']} violated at {tuple(p['witness'])}")
    if "reports" in p:
        lines.append("contraction moduli:")
        lines.extend(_contraction_lines(p["reports"]))
    if "fixed_points" in p:
        labels = ", ".join(p["fixed_points"]["labels"]) or "none"
        lines.append(f"fixed points: {labels}")
    if "strict_fixed_points" in p:
        lines.append("strict fixed points: " + (", ".join(p["strict_fixed_points"]["labels"]) or "none"))
        lines.append("weak fixed points: " + (", ".join(p["weak_fixed_points"]["labels"]) or "none"))
    if "selection" in p:
        sel = p["selection"]
        lines.append(
            f"selection (a={fmt_num(sel['a'])}): {' '.join(sel['image_labels'])}; "
            f"invariant {'holds' if not sel['invariant_violations'] else 'fails'}; "
            f"q={fmt_num(sel['q'])} <= q^(1-a)={fmt_num(sel['rate'])}: {'yes' if sel['transfer_holds'] else 'no'}"
        )
    for run in p.get("runs", []):
        path = " -> ".join(run["step_labels"])
        lines.append(f"start {run['start_label']}: {path}  ({_outcome_text(run['outcome'])})")
        for key in ("rate", "orbit_diameter", "cauchy"):
            if key in run:
                lines.append(f"    {key.replace('_', ' ')} certificates: {_cert_summary(run[key])}")
        if "diameter_witness" in run:
            missing = [n for n, k in enumerate(run["diameter_witness"]) if k is None]
            lines.append(
                "    diameter witness: " + ("present for every n" if not missing else f"missing for n={missing}")
            )
    if "verdict" in p:
        lines.append(f"verdict: {p['verdict']}")
    return "\n".join(lines) + "\n"
