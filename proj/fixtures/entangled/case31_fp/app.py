system_prompt = "You are the case 31 planner. Answer tersely."


def build_agent(config):
    config["systemPrompt"] = system_prompt
    return config
