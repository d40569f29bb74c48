import shutil
import subprocess
import sys

import pytest

from npkit import cli, rdf, signing, trusty
from npkit import nanopub as npmod
from npkit.cli import SUBCOMMANDS, main

from conftest import FIXTURE_PATH, GOLDEN_CODES


@pytest.fixture()
def workdir(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    shutil.copy(FIXTURE_PATH, tmp_path / "nanopubfile.trig")
    return tmp_path


def _servers_file(tmp_path, urls, name="servers.list"):
    f = tmp_path / name
    f.write_text("".join(u + "\n" for u in urls))
    return str(f)


class TestUsage:
    def test_no_args_exits_2_and_lists_subcommands(self, capsys):
        assert main([]) == 2
        out = capsys.readouterr().out
        for sub in SUBCOMMANDS:
            assert sub in out

    def test_ten_subcommands(self):
        assert len(SUBCOMMANDS) == 10

    def test_unknown_subcommand_exits_2(self):
        with pytest.raises(SystemExit) as e:
            main(["frobnicate"])
        assert e.value.code == 2

    def test_console_script(self):
        proc = subprocess.run([sys.executable, "-m", "npkit.cli"],
                              capture_output=True, text=True)
        assert proc.returncode == 2
        assert "mktrusty" in proc.stdout


class TestCheck:
    def test_fixture_summary(self, workdir, capsys):
        assert main(["check", "nanopubfile.trig"]) == 0
        assert capsys.readouterr().out == "Summary: 3 valid (not trusty);\n"

    def test_invalid_input_exits_1(self, workdir, capsys):
        (workdir / "broken.trig").write_text(
            FIXTURE_PATH.read_text().replace("np:hasPublicationInfo :pubinfo.",
                                             ""))
        assert main(["check", "broken.trig"]) == 1
        out = capsys.readouterr().out
        assert "invalid;" in out

    def test_missing_file_exits_1(self, workdir, capsys):
        assert main(["check", "nope.trig"]) == 1
        assert "np check:" in capsys.readouterr().err


class TestMkTrusty:
    def test_writes_prefixed_file_and_prints_uris(self, workdir, capsys):
        assert main(["mktrusty", "-v", "nanopubfile.trig"]) == 0
        out = capsys.readouterr().out
        expected = [
            f"Nanopub URI: {base}{code}"
            for base, code in GOLDEN_CODES.items()
        ]
        assert out.splitlines() == expected
        assert (workdir / "trusty.nanopubfile.trig").exists()

    def test_output_verifies(self, workdir, capsys):
        main(["mktrusty", "nanopubfile.trig"])
        assert capsys.readouterr().out == ""  # quiet without -v
        assert main(["check", "trusty.nanopubfile.trig"]) == 0
        assert capsys.readouterr().out == "Summary: 3 valid (trusty);\n"

    def test_output_flag(self, workdir):
        main(["mktrusty", "-o", "out.trig", "nanopubfile.trig"])
        assert (workdir / "out.trig").exists()

    def test_already_trusty_exits_1(self, workdir, capsys):
        main(["mktrusty", "nanopubfile.trig"])
        assert main(["mktrusty", "trusty.nanopubfile.trig"]) == 1
        assert "fix" in capsys.readouterr().err


class TestFix:
    def test_fix_tampered_file(self, workdir, capsys):
        main(["mktrusty", "nanopubfile.trig"])
        text = (workdir / "trusty.nanopubfile.trig").read_text()
        (workdir / "tampered.trig").write_text(
            text.replace("drugA", "drugZ"))
        assert main(["check", "tampered.trig"]) == 1
        capsys.readouterr()
        assert main(["fix", "-v", "tampered.trig"]) == 0
        out = capsys.readouterr().out
        assert out.count("Nanopub URI:") == 3
        assert main(["check", "fixed.tampered.trig"]) == 0
        assert capsys.readouterr().out == "Summary: 3 valid (trusty);\n"

    def test_fix_of_intact_file_exits_1(self, workdir, capsys):
        main(["mktrusty", "nanopubfile.trig"])
        assert main(["fix", "trusty.nanopubfile.trig"]) == 1
        assert "nothing to fix" in capsys.readouterr().err


class TestMkIndex:
    def test_default_output_and_index_uri_shape(self, workdir, capsys):
        main(["mktrusty", "nanopubfile.trig"])
        capsys.readouterr()
        assert main(["mkindex", "trusty.nanopubfile.trig"]) == 0
        out = capsys.readouterr().out
        assert out.startswith("Index URI: http://np.inn.ac/RA")
        assert (workdir / "index.trig").exists()
        items = npmod.extract_nanopubs(
            rdf.parse((workdir / "index.trig").read_text(), "trig"))
        assert all(trusty.verify_trusty(np) == trusty.VALID for np in items)

    def test_plain_input_rejected(self, workdir, capsys):
        assert main(["mkindex", "nanopubfile.trig"]) == 1
        assert "trusty" in capsys.readouterr().err


class TestNetworkCommands:
    def test_publish_status_get(self, workdir, capsys, local_network):
        urls, _ = local_network(5)
        servers = _servers_file(workdir, urls)
        main(["mktrusty", "nanopubfile.trig"])

        for k, url in enumerate(urls):
            one = _servers_file(workdir, [url], name=f"one{k}.list")
            assert main(["publish", "--servers", one,
                         "trusty.nanopubfile.trig"]) == 0
        out = capsys.readouterr().out
        assert f"3 nanopubs published at {urls[0]}" in out

        code = GOLDEN_CODES["http://example.org/np1#"]
        assert main(["status", "-a", "--servers", servers,
                     f"http://example.org/np1#{code}"]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert len([l for l in lines if l.startswith("URL: ")]) == 5
        assert lines[-1] == "Found on 5 nanopub servers."

        assert main(["get", "--servers", servers, code]) == 0
        got = capsys.readouterr().out
        assert code in got

        assert main(["get", "--servers", servers, "-o", "np1.trig",
                     f"http://example.org/np1#{code}"]) == 0
        assert (workdir / "np1.trig").exists()

    def test_get_index_content(self, workdir, capsys, local_network):
        urls, _ = local_network(1)
        servers = _servers_file(workdir, urls)
        main(["mktrusty", "nanopubfile.trig"])
        main(["publish", "--servers", servers, "trusty.nanopubfile.trig"])
        main(["mkindex", "trusty.nanopubfile.trig"])
        main(["publish", "--servers", servers, "index.trig"])
        out = capsys.readouterr().out
        index_uri = [l for l in out.splitlines()
                     if l.startswith("Index URI:")][0].split(": ", 1)[1]
        assert main(["get", "-c", "-o", "content.trig", "--servers", servers,
                     index_uri]) == 0
        items = npmod.extract_nanopubs(
            rdf.parse((workdir / "content.trig").read_text(), "trig"))
        assert len(items) == 4

    def test_server_info_command(self, workdir, capsys, local_network):
        urls, _ = local_network(1)
        assert main(["server", urls[0]]) == 0
        out = capsys.readouterr().out
        assert "Nanopub count: 0" in out

    def test_env_var_server_list(self, workdir, capsys, local_network,
                                 monkeypatch):
        urls, _ = local_network(1)
        monkeypatch.setenv("NP_SERVERS", " ".join(urls))
        main(["mktrusty", "nanopubfile.trig"])
        assert main(["publish", "trusty.nanopubfile.trig"]) == 0


class TestKeysAndSign:
    def test_mkkeys_and_sign(self, workdir, capsys):
        assert main(["mkkeys", "-k", "id_rsa"]) == 0
        capsys.readouterr()
        assert main(["sign", "-v", "-k", "id_rsa", "nanopubfile.trig"]) == 0
        out = capsys.readouterr().out
        assert out.count("Nanopub URI:") == 3
        assert (workdir / "signed.nanopubfile.trig").exists()
        assert main(["check", "signed.nanopubfile.trig"]) == 0
        assert capsys.readouterr().out == "Summary: 3 signed;\n"

    def test_sign_trusty_input_exits_1(self, workdir, capsys):
        main(["mkkeys", "-k", "id_rsa"])
        main(["mktrusty", "nanopubfile.trig"])
        assert main(["sign", "-k", "id_rsa",
                     "trusty.nanopubfile.trig"]) == 1
        assert "precede" in capsys.readouterr().err

    def test_mkkeys_twice_exits_1(self, workdir, capsys):
        main(["mkkeys", "-k", "id_rsa"])
        assert main(["mkkeys", "-k", "id_rsa"]) == 1
        assert "overwrite" in capsys.readouterr().err
