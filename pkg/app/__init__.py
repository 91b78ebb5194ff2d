# LurkScope: temporal lurker ranking toolkit
