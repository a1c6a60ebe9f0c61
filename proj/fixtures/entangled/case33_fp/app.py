system_prompt = "You are the case 33 planner. Answer tersely."


def build_agent(config):
    config["systemPrompt"] = system_prompt
    return config
