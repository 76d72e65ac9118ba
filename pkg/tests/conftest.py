import pytest

from percolab.generators import adversarial_union, circulant, complete, petersen, prism, random_regular

DESK_N = 100_000
DESK_SEED = 42


@pytest.fixture(scope="session")
def k4():
    return complete(3)


@pytest.fixture(scope="session")
def petersen_graph():
    return petersen()


@pytest.fixture(scope="session")
def small_fixtures():
    """Every small deterministic fixture, keyed by name (all n <= 24)."""
    k4 = complete(3)
    pet = petersen()
    return {
        "K4": k4,
        "K5": complete(4),
        "petersen": pet,
        "prism3": prism(3),
        "prism6": prism(6),
        "circ6_13": circulant(6, [1, 3]),
        "circ8_14": circulant(8, [1, 4]),
        "union_K4_K4": adversarial_union(k4, k4, 1, seed=0),
        "union_pet_pet": adversarial_union(pet, pet, 2, seed=0),
        "rr12": random_regular(12, 3, seed=1),
        "rr14": random_regular(14, 3, seed=2),
        "rr16_4": random_regular(16, 4, seed=3),
        "rr24": random_regular(24, 3, seed=4),
    }


@pytest.fixture(scope="session")
def desk_graph():
    return random_regular(DESK_N, 3, seed=DESK_SEED)


# ---- acceptance summary -------------------------------------------------
# Tests carry @pytest.mark.acceptance("ACn", "title"); a criterion passes only
# if every test tagged with it passed.

_ACCEPTANCE = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(cid, title): acceptance criterion a test belongs to")


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    cid, title = marker.args
    entry = _ACCEPTANCE.setdefault(cid, {"title": title, "ok": True, "notes": []})
    if call.excinfo is not None and (call.when == "call" or call.excinfo.typename != "Skipped"):
        entry["ok"] = False
        entry["notes"].append(f"{item.name}: {call.excinfo.typename}")


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for cid in sorted(_ACCEPTANCE, key=lambda c: int(c[2:])):
        entry = _ACCEPTANCE[cid]
        status = "PASS" if entry["ok"] else "FAIL"
        line = f"{cid:<5} {status}  {entry['title']}"
        if entry["notes"]:
            line += "  [" + "; ".join(entry["notes"]) + "]"
        tr.write_line(line)
