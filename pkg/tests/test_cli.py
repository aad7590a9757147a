import http.server
import json
import os
import shutil
import socket
import threading

import pytest

from helpers import CONTRACTS, FIXTURES
from tezla import cli, corpus, parse_micheline, rpc
from tezla.errors import SolverDivergence
from tezla.interp import Stuck

GOOD = str(CONTRACTS / "sign_mul.tz")
ADDRESS = "KT1BEqzn5Wx8uJrZNvuS9DVHmLvG9td3fDLi"


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_decompile(capsys):
    code, out, _ = run(capsys, "decompile", GOOD)
    assert code == 0
    assert out.startswith("v0 := CAR parameter_storage;")
    assert "return v11;" in out


def test_decompile_json_input(capsys):
    code, out, _ = run(capsys, "decompile", str(CONTRACTS / "sign_mul.json"))
    assert code == 0
    assert out == run(capsys, "decompile", GOOD)[1]


def test_decompile_to_file(capsys, tmp_path):
    target = tmp_path / "out.tezla"
    assert run(capsys, "decompile", GOOD, "-o", str(target))[0] == 0
    assert target.read_text().endswith("return v11;\n")


@pytest.mark.parametrize("path,code", [
    (FIXTURES / "invalid" / "syntax.tz", 1),
    (FIXTURES / "unsupported" / "lambda.tz", 1),
    (FIXTURES / "missing.tz", 1),
    (FIXTURES / "invalid" / "underflow.tz", 2),
])
def test_decompile_error_codes(capsys, path, code):
    got, out, err = run(capsys, "decompile", str(path))
    assert got == code
    assert out == ""
    assert err.startswith("tezla: ")


def test_usage_errors_exit_1(capsys):
    with pytest.raises(SystemExit) as info:
        cli.main(["frobnicate"])
    assert info.value.code == 1
    with pytest.raises(SystemExit) as info:
        cli.main(["analyze", GOOD, "--analysis", "taint"])
    assert info.value.code == 1


def test_cfg_dot(capsys, tmp_path):
    code, out, _ = run(capsys, "cfg", GOOD)
    assert code == 0 and out.startswith("digraph cfg {")
    target = tmp_path / "g.dot"
    assert run(capsys, "cfg", GOOD, "--dot", str(target))[0] == 0
    assert target.read_text() == out


def test_analyze_text_and_json(capsys):
    code, out, _ = run(capsys, "analyze", GOOD)
    assert code == 0
    assert out.splitlines()[0] == "0: { v0: 0+ }"
    code, out, _ = run(capsys, "analyze", GOOD, "--report", "json")
    assert json.loads(out)["8"]["v0"] == "+"
    code, out, _ = run(capsys, "analyze", GOOD, "--analysis", "liveness")
    assert code == 0 and out.splitlines()[-1] == "13: { v11 }"


def test_analysis_error_exits_3(capsys, monkeypatch):
    def boom(*a, **k):
        raise SolverDivergence("forced")
    monkeypatch.setattr(cli, "solve", boom)
    code, _, err = run(capsys, "analyze", GOOD)
    assert code == 3 and "forced" in err


def test_check_passes(capsys):
    code, out, _ = run(capsys, "check", GOOD, "--runs", "20", "--seed", "7")
    assert code == 0
    assert out.splitlines()[-1] == "verdict: pass (20/20 runs)"
    code, out, _ = run(capsys, "check", GOOD, "--runs", "3", "--json")
    assert json.loads(out)["verdict"] == "pass"


def test_check_divergence_exits_3(capsys, monkeypatch):
    from tezla.interp import differential
    monkeypatch.setattr(differential, "run_tezla", lambda *a, **k: Stuck("sabotaged"))
    code, out, _ = run(capsys, "check", GOOD, "--runs", "5")
    assert code == 3
    assert "tezla:     stuck: sabotaged" in out
    assert out.splitlines()[-1] == "verdict: fail (1/5 runs)"


# -- fetch ---------------------------------------------------------------------------

class _Handler(http.server.BaseHTTPRequestHandler):
    routes = {}

    def do_GET(self):  # noqa: N802
        status, body = self.routes.get(self.path, (404, "not found"))
        data = body.encode()
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        self.wfile.write(data)

    def log_message(self, *args):
        pass


@pytest.fixture
def node():
    server = http.server.ThreadingHTTPServer(("127.0.0.1", 0), _Handler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    code = json.loads((CONTRACTS / "sign_mul.json").read_text())
    path = rpc.script_url("", ADDRESS)
    _Handler.routes = {
        path: (200, json.dumps({"code": code, "storage": {"int": "0"}})),
        rpc.script_url("", "KT1" + "a" * 33): (200, json.dumps({"storage": {"int": "0"}})),
        rpc.script_url("", "KT1" + "b" * 33): (200, "<html>"),
    }
    yield f"http://127.0.0.1:{server.server_address[1]}"
    server.shutdown()


def test_fetch_from_local_node(capsys, node, tmp_path):
    target = tmp_path / "c.json"
    code, _, _ = run(capsys, "fetch", ADDRESS, "--rpc", node, "-o", str(target))
    assert code == 0
    assert parse_micheline(target.read_text()) == parse_micheline((CONTRACTS / "sign_mul.json").read_text())


@pytest.mark.parametrize("address,code", [
    ("KT1" + "c" * 33, 4),  # 404
    ("KT1" + "a" * 33, 4),  # no code member
    ("KT1" + "b" * 33, 4),  # not JSON
    ("not-an-address", 1),
    ("KT1" + "0" * 33, 1),  # 0 is not base58
])
def test_fetch_errors(capsys, node, address, code):
    assert run(capsys, "fetch", address, "--rpc", node)[0] == code


def test_fetch_unreachable_node(capsys):
    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        port = s.getsockname()[1]
    assert run(capsys, "fetch", ADDRESS, "--rpc", f"http://127.0.0.1:{port}", "--timeout", "2")[0] == 4


def test_rpc_url_from_environment(monkeypatch):
    monkeypatch.setenv(rpc.RPC_ENV, "http://example.invalid")
    assert rpc.default_rpc() == "http://example.invalid"
    assert rpc.script_url("http://x/", ADDRESS) == f"http://x/chains/main/blocks/head/context/contracts/{ADDRESS}/script"


@pytest.mark.network
@pytest.mark.skipif(not os.environ.get("TEZLA_LIVE_RPC"), reason="set TEZLA_LIVE_RPC to query a real node")
def test_fetch_live(capsys):
    url = os.environ["TEZLA_LIVE_RPC"]
    if url in ("1", "yes", "true"):
        url = rpc.DEFAULT_RPC
    # tzBTC token contract on mainnet
    code, out, _ = run(capsys, "fetch", "KT1PWx2mnDueood7fEmfbBDKx1D9BAnnXitn", "--rpc", url)
    assert code == 0
    prims = {item["prim"] for item in json.loads(out)}
    assert prims == {"parameter", "storage", "code"}


# -- corpus ---------------------------------------------------------------------------

def test_corpus_csv(capsys, tmp_path):
    work = tmp_path / "corpus"
    shutil.copytree(CONTRACTS, work / "ok")
    shutil.copytree(FIXTURES / "unsupported", work / "unsupported")
    shutil.copytree(FIXTURES / "invalid", work / "invalid")
    target = tmp_path / "report.csv"
    assert run(capsys, "corpus", str(work), "--jobs", "2", "-o", str(target))[0] == 0
    text = target.read_text()
    rows = corpus.read_csv(text)
    assert list(rows[0]) == list(corpus.COLUMNS)
    status = {os.path.basename(r["path"]): r["status"] for r in rows}
    assert status["lambda.tz"] == "parse_error:LAMBDA"
    assert status["syntax.tz"] == "parse_error"
    assert status["underflow.tz"] == "decompile_error"
    assert status["sign_mul.tz"] == "ok"
    assert sum(1 for s in status.values() if s == "ok") == len(list(CONTRACTS.iterdir()))
    summary = [line for line in text.splitlines() if line.startswith("#")]
    assert [line.split(":")[0] for line in summary] == [
        "# contracts", "# average time", "# worst-case time", "# worst-case instructions",
        "# average time per instruction"]


def test_corpus_parallel_matches_serial():
    serial = corpus.corpus_run(CONTRACTS, jobs=1)
    parallel = corpus.corpus_run(CONTRACTS, jobs=3)
    assert [(e.path, e.instructions, e.status) for e in serial] == [
        (e.path, e.instructions, e.status) for e in parallel]


def test_corpus_liveness(capsys, tmp_path):
    code, out, _ = run(capsys, "corpus", str(CONTRACTS), "--analysis", "liveness")
    assert code == 0
    assert all(r["status"] == "ok" for r in corpus.read_csv(out))


def test_corpus_reads_address_from_json(tmp_path):
    doc = json.loads((CONTRACTS / "sign_mul.json").read_text())
    (tmp_path / "c.json").write_text(json.dumps({"address": ADDRESS, "code": doc}))
    (entry,) = corpus.corpus_run(tmp_path)
    assert entry.address == ADDRESS
    assert entry.status == "ok"
