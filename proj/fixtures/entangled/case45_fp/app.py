import autogen

manager = autogen.GroupChat(is_termination_msg=lambda m: "DONE" in m["content"])
