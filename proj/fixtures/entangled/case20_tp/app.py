import json


def run_pipeline(payload):
    timeout = 30
    parsed = json.loads(payload)
    return {"items": parsed, "budget": timeout}
