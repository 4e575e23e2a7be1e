import pytest
from fastapi.testclient import TestClient
from sqlalchemy import text
from sqlalchemy.orm import sessionmaker

from db.database import Base, get_db, make_engine
from dependencies import Settings, get_settings
from main import app
from tests.conftest import SEVEN_GENS, STABLE_NOT_BOREL

SEVEN = SEVEN_GENS.split(", ")
SMALL = ["x1^2", "x1*x2", "x1*x3", "x2^2"]


@pytest.fixture
def engine():
    return make_engine("sqlite://")


@pytest.fixture
def client(engine):
    Base.metadata.create_all(bind=engine)
    TestingSession = sessionmaker(autocommit=False, autoflush=False, bind=engine)

    def override_get_db():
        db = TestingSession()
        try:
            yield db
        finally:
            db.close()

    app.dependency_overrides[get_db] = override_get_db
    yield TestClient(app)
    app.dependency_overrides.clear()


def test_health_check(client):
    response = client.get("/")
    assert response.status_code == 200
    assert response.json()["status"] == "online"


def test_polarize(client):
    response = client.post("/ideals/polarize", json={"generators": ["x1^2", "x1*x2", "x2^2"]})
    assert response.status_code == 200
    body = response.json()
    assert body["borel_fixed"] is True
    assert body["ring"] == {"kind": "double", "n": 2, "d": 2}
    assert body["generators"] == ["x[1,1]*x[1,2]", "x[1,1]*x[2,2]", "x[2,1]*x[2,2]"]

    response = client.post("/ideals/polarize", json={"generators": STABLE_NOT_BOREL.split(", ")})
    assert response.status_code == 200
    assert response.json()["borel_fixed"] is False


def test_sq_and_gamma(client):
    sq = client.post("/ideals/sq", json={"generators": ["x1^2", "x1*x2", "x2^2"]}).json()
    assert sq["generators"] == ["x1*x2", "x1*x3", "x2*x3"]
    gamma = client.post("/ideals/gamma", json={"generators": ["x1^2", "x1*x2", "x2^2"], "a": [0, 1]}).json()
    assert gamma["generators"] == sq["generators"]
    response = client.post("/ideals/gamma", json={"generators": ["x1^2"], "a": [1, 2]})
    assert response.status_code == 400


def test_resolve(client):
    response = client.post("/ideals/resolve", json={"generators": SEVEN})
    assert response.status_code == 200
    doc = response.json()["complex"]
    assert doc["ranks"] == [1, 7, 12, 8, 2]
    assert doc["config"]["target"] == "bpol"

    specialized = client.post("/ideals/resolve?target=S", json={"generators": SEVEN}).json()
    assert specialized["complex"]["ring"]["kind"] == "single"


def test_resolve_gamma(client):
    response = client.post("/ideals/resolve?target=gamma", json={"generators": SEVEN, "a": [0, 1]})
    assert response.status_code == 200
    doc = response.json()["complex"]
    assert doc["ranks"] == [1, 7, 12, 8, 2]
    assert doc["ring"]["kind"] == "single"
    assert doc["config"]["a"] == [0, 1]
    assert client.post("/ideals/resolve?target=gamma", json={"generators": SEVEN}).status_code == 400


def test_resolve_errors(client):
    response = client.post("/ideals/resolve", json={"generators": STABLE_NOT_BOREL.split(", ")})
    assert response.status_code == 422
    response = client.post("/ideals/resolve", json={"generators": ["x1^2", "x1*y2"]})
    assert response.status_code == 400
    response = client.post("/ideals/resolve?target=nowhere", json={"generators": SEVEN})
    assert response.status_code == 422
    response = client.post(
        "/ideals/resolve", json={"generators": STABLE_NOT_BOREL.split(", "), "closure": True}
    )
    assert response.status_code == 200


def test_betti(client):
    response = client.post("/ideals/betti", json={"generators": SEVEN, "polarize": True})
    assert response.status_code == 200
    body = response.json()
    assert body["totals"] == [7, 12, 8, 2]
    assert body["method"] == "koszul"
    assert body["ideal"]["ring"]["kind"] == "double"


def test_lcm_lattice(client):
    response = client.post("/ideals/lcm-lattice", json={"generators": ["x1", "x2"]})
    assert response.json()["elements"] == ["x2", "x1", "x1*x2"]


def test_verify_is_stored(client, monkeypatch):
    response = client.post("/verify", json={"generators": SMALL, "name": "small"})
    assert response.status_code == 200
    report = response.json()
    assert report["passed"] is True
    assert report["ranks"][1:] == report["ek_counts"]

    runs = client.get("/runs").json()
    assert len(runs) == 1
    run_id = runs[0]["id"]
    detail = client.get(f"/runs/{run_id}").json()
    assert detail["passed"] is True
    assert detail["report"]["ranks"] == report["ranks"]
    assert client.get("/runs/999").status_code == 404

    assert client.delete(f"/runs/{run_id}").status_code in (401, 403)
    monkeypatch.setenv("ADMIN_SECRET_TOKEN", "let-me-in")
    wrong = client.delete(f"/runs/{run_id}", headers={"Authorization": "Bearer nope"})
    assert wrong.status_code == 401
    response = client.delete(f"/runs/{run_id}", headers={"Authorization": "Bearer let-me-in"})
    assert response.status_code == 200
    assert client.get("/runs").json() == []


def test_morse(client):
    response = client.post("/morse", json={"generators": SEVEN})
    assert response.status_code == 200
    body = response.json()
    assert body["passed"] is True
    assert body["f_vector"] == [7, 12, 8, 2]


def test_morse_size_limit(client):
    app.dependency_overrides[get_settings] = lambda: Settings(max_gens=3)
    try:
        response = client.post("/morse", json={"generators": SEVEN})
    finally:
        del app.dependency_overrides[get_settings]
    assert response.status_code == 413


def test_diagram(client):
    response = client.post(
        "/diagram",
        json={"generators": ["x1^2*x2*x6^2"], "closure": True, "generator": "x1^2*x2*x6^2", "rows": [1, 2, 3, 4, 5]},
    )
    assert response.status_code == 200
    body = response.json()
    assert body["diagram"] == "BBW..\n..BW.\n...W.\n...W.\n...W.\n...BB"
    assert body["rmv_blocks"][0] == [[1, 3], [2, 3]]


def test_poset(client):
    body = client.post("/poset", json={"generators": SEVEN}).json()
    assert body["nodes"] == 29
    assert body["dot"].count("label=") == 29


def test_deleting_an_ideal_drops_its_runs(client, engine):
    client.post("/verify", json={"generators": SMALL, "name": "small"})
    assert len(client.get("/runs").json()) == 1
    with engine.begin() as conn:
        conn.execute(text("DELETE FROM ideals"))
    assert client.get("/runs").json() == []
