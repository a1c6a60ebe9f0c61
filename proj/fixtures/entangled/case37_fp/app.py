from agentlib import Agent

agent = Agent(system_prompt="You are the case 37 planner.", verbose=True)
