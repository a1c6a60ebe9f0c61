from agentlib import tool


@tool
def terminate(text: str) -> str:
    return text
